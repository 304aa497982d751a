/* tslint:disable */
/* eslint-disable */

/**
 * A rest Gaussian of unit width and mass `k · 8π` on `[-L, L]²`.
 */
export class Simulation {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Advances by `duration` and records one diagnostics sample; returns the new time.
     */
    advance(duration: number): number;
    /**
     * Cell densities, `x` fastest.
     */
    density(): Float64Array;
    /**
     * Samples so far as a JSON array of diagnostics records.
     */
    history_json(): string;
    n(): number;
    constructor(mass_over_critical: number, n: number, half_width: number);
    rho_max_ratio(): number;
    time(): number;
}

export function critical_mass(): number;

/**
 * `[F, −C(M)]` for a Gaussian of mass `M` and width `σ`, sampled on a grid wide
 * enough to hold it; the bound says `F ≥ −C(M)`.
 */
export function loghls_gaussian(mass: number, sigma: number): Float64Array;

/**
 * `d/dt (X₂ + Xₘ)` at rest: `4M(1 − M/8π)`.
 */
export function virial_slope(mass_over_critical: number): number;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_simulation_free: (a: number, b: number) => void;
    readonly critical_mass: () => number;
    readonly loghls_gaussian: (a: number, b: number) => [number, number, number, number];
    readonly simulation_advance: (a: number, b: number) => [number, number, number];
    readonly simulation_density: (a: number) => [number, number];
    readonly simulation_history_json: (a: number) => [number, number];
    readonly simulation_n: (a: number) => number;
    readonly simulation_new: (a: number, b: number, c: number) => [number, number, number];
    readonly simulation_rho_max_ratio: (a: number) => number;
    readonly simulation_time: (a: number) => number;
    readonly virial_slope: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
