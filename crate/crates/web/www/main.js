import init, { Simulation, loghls_gaussian, virial_slope, critical_mass } from "./pkg/ksfluid_web.js";

await init();

const $ = (id) => document.getElementById(id);
const canvas = $("rho");
const ctx = canvas.getContext("2d");
let sim = null;
let timer = null;

function draw() {
  const n = sim.n();
  if (canvas.width !== n) {
    canvas.width = n;
    canvas.height = n;
  }
  const rho = sim.density();
  let lo = Infinity, hi = -Infinity;
  const logs = rho.map((v) => Math.log10(Math.max(v, 1e-8)));
  for (const v of logs) { lo = Math.min(lo, v); hi = Math.max(hi, v); }
  lo = Math.max(lo, hi - 6);
  const img = ctx.createImageData(n, n);
  for (let j = 0; j < n; j++) {
    for (let i = 0; i < n; i++) {
      const s = Math.min(1, Math.max(0, (logs[j * n + i] - lo) / (hi - lo || 1)));
      // y grows upwards on screen
      const k = 4 * ((n - 1 - j) * n + i);
      img.data[k] = 255 * Math.sqrt(s);
      img.data[k + 1] = 255 * s * s;
      img.data[k + 2] = 255 * (1 - s) * s * 2;
      img.data[k + 3] = 255;
    }
  }
  ctx.putImageData(img, 0, 0);
}

function stop() {
  if (timer !== null) clearInterval(timer);
  timer = null;
}

$("start").onclick = () => {
  stop();
  try {
    sim = new Simulation(Number($("ratio").value), Number($("n").value), 5.0);
  } catch (e) {
    $("status").textContent = String(e);
    return;
  }
  draw();
  timer = setInterval(() => {
    try {
      sim.advance(0.02);
    } catch (e) {
      $("status").textContent = `stopped: ${e}`;
      stop();
      return;
    }
    const h = JSON.parse(sim.history_json());
    const r = h[h.length - 1];
    $("status").textContent =
      `t = ${sim.time().toFixed(3)}\n` +
      `X2 + Xm = ${(r.second_moment + r.cross_moment).toFixed(4)}\n` +
      `rho_max / rho_max(0) = ${sim.rho_max_ratio().toFixed(2)}\n` +
      `K = ${r.kinetic.toFixed(4)}`;
    draw();
  }, 30);
};
$("stop").onclick = stop;

$("hls").onclick = () => {
  try {
    const [f, bound] = loghls_gaussian(Number($("hls-mass").value), Number($("hls-sigma").value));
    $("hls-out").textContent =
      `F      = ${f.toFixed(6)}\n-C(M)  = ${bound.toFixed(6)}\nF + C  = ${(f - bound).toFixed(6)}`;
  } catch (e) {
    $("hls-out").textContent = String(e);
  }
};

const showSlope = () => {
  const k = Number($("slope-ratio").value);
  $("slope-out").textContent =
    `M = ${(k * critical_mass()).toFixed(3)}: d/dt(X2 + Xm) = ${virial_slope(k).toFixed(3)}`;
};
$("slope-ratio").oninput = showSlope;
showSlope();
