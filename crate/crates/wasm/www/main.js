import init, { simulateTrial, triggerCurve, ySweep } from "./pkg/etvbf_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function frame(canvas, xs, ys) {
  const pad = 30;
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  const sx = (canvas.width - 2 * pad) / (x1 - x0 || 1);
  const sy = (canvas.height - 2 * pad) / (y1 - y0 || 1);
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = "#666";
  ctx.fillText(y1.toPrecision(3), 2, pad);
  ctx.fillText(y0.toPrecision(3), 2, canvas.height - pad);
  ctx.fillText(x0.toPrecision(3), pad, canvas.height - 8);
  ctx.fillText(x1.toPrecision(3), canvas.width - pad - 30, canvas.height - 8);
  return {
    ctx,
    px: (x) => pad + (x - x0) * sx,
    py: (y) => canvas.height - pad - (y - y0) * sy,
  };
}

function line(f, pts, color) {
  f.ctx.strokeStyle = color;
  f.ctx.beginPath();
  pts.forEach(([x, y], i) => (i ? f.ctx.lineTo(f.px(x), f.py(y)) : f.ctx.moveTo(f.px(x), f.py(y))));
  f.ctx.stroke();
}

function runTrial() {
  try {
    const t = JSON.parse(simulateTrial($("t-filter").value, num("t-y"), num("t-r"), num("t-seed"), num("t-steps")));
    const all = t.truth.concat(t.estimate);
    const f = frame($("t-track"), all.map((p) => p[0]), all.map((p) => p[1]));
    line(f, t.truth, "#888");
    line(f, t.estimate, "#06c");
    f.ctx.fillStyle = "#c60";
    t.truth.forEach((p, k) => t.gamma[k] && f.ctx.fillRect(f.px(p[0]) - 1.5, f.py(p[1]) - 1.5, 3, 3));

    const steps = t.position_error.map((_, k) => k + 1);
    const g = frame($("t-error"), steps, t.position_error.concat([0]));
    line(g, t.position_error.map((e, k) => [k + 1, e]), "#06c");
    g.ctx.fillStyle = "#c60";
    t.gamma.forEach((s, k) => s && g.ctx.fillRect(g.px(k + 1), $("t-error").height - 28, 1, 6));

    const iters = t.iterations.reduce((a, b) => a + b, 0) / t.iterations.length;
    $("t-summary").innerHTML =
      `RMSE ${t.rmse.toFixed(3)}, communication rate ${t.comm_rate.toFixed(3)}, mean sweeps ${iters.toFixed(2)}` +
      (t.failure ? ` <span class="err">failed at ${t.failure}</span>` : "");
  } catch (e) {
    $("t-summary").innerHTML = `<span class="err">${e}</span>`;
  }
}

function drawCurve() {
  try {
    const pts = JSON.parse(triggerCurve(num("c-y"), num("c-max"), 200));
    const f = frame($("c-plot"), pts.map((p) => p.e), [0, 1]);
    line(f, pts.map((p) => [p.e, p.silent]), "#c60");
    line(f, pts.map((p) => [p.e, 1 - p.silent]), "#06c");
    f.ctx.fillStyle = "#222";
    f.ctx.fillText("P(silent)", f.px(pts[0].e) + 6, f.py(1) + 12);
    f.ctx.fillText("P(send)", f.px(pts[pts.length - 1].e) - 50, f.py(1) + 12);
  } catch (e) {
    $("c-plot").getContext("2d").fillText(String(e), 10, 20);
  }
}

function runSweep() {
  const out = $("s-out");
  try {
    const grid = new Float64Array($("s-grid").value.split(",").map(Number));
    const rows = JSON.parse(ySweep(grid, num("s-r"), num("s-mc"), num("s-steps"), 1));
    out.innerHTML =
      "<table><tr><th>y</th><th>filter</th><th>RMSE</th><th>comm rate</th><th>sweeps</th><th>failures</th></tr>" +
      rows
        .map((r) => `<tr><td>${r.y}</td><td>${r.filter}</td><td>${r.rmse.toFixed(3)}</td>` +
          `<td>${r.comm_rate.toFixed(3)}</td><td>${r.mean_iterations.toFixed(2)}</td><td>${r.failures}</td></tr>`)
        .join("") +
      "</table>";
  } catch (e) {
    out.innerHTML = `<span class="err">${e}</span>`;
  }
}

await init();
$("t-run").onclick = runTrial;
$("c-run").onclick = drawCurve;
$("s-run").onclick = runSweep;
runTrial();
drawCurve();
