import init, { conservativity_curve, power_curve, two_sided_correlation } from "./pkg/equivtest_web.js";

const PAD = 40;

function num(id) {
  return Number(document.getElementById(id).value);
}

// series: array of {xs, ys, color}; all axes span [0, 1] unless given.
function plot(canvas, series, yRange = [0, 1], xRange = [0, 1], marks = []) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height;
  const sx = x => PAD + (x - xRange[0]) / (xRange[1] - xRange[0]) * (w - 2 * PAD);
  const sy = y => h - PAD - (y - yRange[0]) / (yRange[1] - yRange[0]) * (h - 2 * PAD);
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#444";
  ctx.font = "12px sans-serif";
  ctx.beginPath();
  ctx.moveTo(sx(xRange[0]), sy(yRange[0]));
  ctx.lineTo(sx(xRange[1]), sy(yRange[0]));
  ctx.moveTo(sx(xRange[0]), sy(yRange[0]));
  ctx.lineTo(sx(xRange[0]), sy(yRange[1]));
  ctx.stroke();
  for (let i = 0; i <= 4; i++) {
    const fx = xRange[0] + (xRange[1] - xRange[0]) * i / 4;
    const fy = yRange[0] + (yRange[1] - yRange[0]) * i / 4;
    ctx.fillText(fx.toFixed(2), sx(fx) - 12, h - PAD + 16);
    ctx.fillText(fy.toFixed(2), 4, sy(fy) + 4);
  }
  ctx.setLineDash([4, 4]);
  for (const m of marks) {
    ctx.beginPath();
    ctx.moveTo(sx(m), sy(yRange[0]));
    ctx.lineTo(sx(m), sy(yRange[1]));
    ctx.stroke();
  }
  ctx.setLineDash([]);
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    s.xs.forEach((x, i) => (i ? ctx.lineTo(sx(x), sy(s.ys[i])) : ctx.moveTo(sx(x), sy(s.ys[i]))));
    ctx.stroke();
  }
}

function triples(flat) {
  const xs = [], pv = [], pb = [];
  for (let i = 0; i < flat.length; i += 3) {
    xs.push(flat[i]);
    pv.push(flat[i + 1]);
    pb.push(flat[i + 2]);
  }
  return { xs, pv, pb };
}

function drawModel() {
  const status = document.getElementById("status");
  const args = [num("n"), num("theta1"), num("theta2"), num("p"), num("q")];
  const cdf = conservativity_curve(...args, 201);
  const power = power_curve(...args, num("alpha"), 199);
  if (cdf.length === 0 || power.length === 0) {
    status.textContent = "Invalid settings: need 0 < θ₁ < θ₂ < 1, n ≥ 1, positive prior parameters and 0 < α < 1.";
    return;
  }
  status.textContent = "";
  const c = triples(cdf);
  plot(document.getElementById("cdf"), [
    { xs: c.xs, ys: c.pv, color: "#1f77b4" },
    { xs: c.xs, ys: c.pb, color: "#d62728" },
  ], [0, 1], [0, 1], [num("alpha")]);
  const p = triples(power);
  plot(document.getElementById("power"), [
    { xs: p.xs, ys: p.pv, color: "#1f77b4" },
    { xs: p.xs, ys: p.pb, color: "#d62728" },
  ], [0, 1], [0, 1], [num("theta1"), num("theta2")]);
}

function drawCorrelation() {
  const flat = two_sided_correlation(num("wpoints"));
  const xs = [], ys = [];
  for (let i = 0; i < flat.length; i += 2) {
    xs.push(flat[i]);
    ys.push(flat[i + 1]);
  }
  const lo = Math.min(...ys);
  plot(document.getElementById("corr"), [{ xs, ys, color: "#2ca02c" }], [Math.floor(lo * 10) / 10, 1], [0, 1]);
}

await init();
for (const id of ["n", "theta1", "theta2", "p", "q", "alpha"]) {
  document.getElementById(id).addEventListener("input", drawModel);
}
document.getElementById("wpoints").addEventListener("input", drawCorrelation);
drawModel();
drawCorrelation();
