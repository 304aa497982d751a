/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_simulation_free: (a: number, b: number) => void;
export const critical_mass: () => number;
export const loghls_gaussian: (a: number, b: number) => [number, number, number, number];
export const simulation_advance: (a: number, b: number) => [number, number, number];
export const simulation_density: (a: number) => [number, number];
export const simulation_history_json: (a: number) => [number, number];
export const simulation_n: (a: number) => number;
export const simulation_new: (a: number, b: number, c: number) => [number, number, number];
export const simulation_rho_max_ratio: (a: number) => number;
export const simulation_time: (a: number) => number;
export const virial_slope: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
