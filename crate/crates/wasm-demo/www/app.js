// Page logic for the streamquant demo. Plain ES modules and canvas 2D;
// the numerical work happens in the wasm module built from ../src/lib.rs.

import init, { design_quantizer, allocate_streams, sweep_curves } from "./pkg/streamquant_demo.js";

const COLORS = {
  ideal: "#111827",
  jbp: "#2563eb",
  ub: "#059669",
  greedy: "#d97706",
  unaware_wf: "#dc2626",
};

function parsed(json, readout) {
  const value = JSON.parse(json);
  if (value.error) {
    readout.innerHTML = `<span class="error">${value.error}</span>`;
    return null;
  }
  return value;
}

function clearCanvas(canvas) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  return ctx;
}

// Maps data coordinates to pixels inside a margin box.
function frame(canvas, x0, x1, y0, y1) {
  const margin = { left: 56, right: 16, top: 14, bottom: 34 };
  const w = canvas.width - margin.left - margin.right;
  const h = canvas.height - margin.top - margin.bottom;
  return {
    x: (v) => margin.left + ((v - x0) / (x1 - x0)) * w,
    y: (v) => margin.top + (1 - (v - y0) / (y1 - y0)) * h,
    box: margin,
    w,
    h,
  };
}

function axes(ctx, canvas, f, xLabel, yLabel) {
  ctx.strokeStyle = "#9aa4b2";
  ctx.lineWidth = 1;
  ctx.strokeRect(f.box.left, f.box.top, f.w, f.h);
  ctx.fillStyle = "#5b6878";
  ctx.font = "12px system-ui";
  ctx.textAlign = "center";
  ctx.fillText(xLabel, f.box.left + f.w / 2, canvas.height - 8);
  ctx.save();
  ctx.translate(14, f.box.top + f.h / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(yLabel, 0, 0);
  ctx.restore();
}

// ---------------------------------------------------------------------------
// Panel 1: quantizer staircase
// ---------------------------------------------------------------------------

const qBits = document.getElementById("q-bits");
const qBitsValue = document.getElementById("q-bits-value");
const qCanvas = document.getElementById("q-canvas");
const qReadout = document.getElementById("q-readout");

function drawQuantizer() {
  qBitsValue.textContent = qBits.value;
  const value = parsed(design_quantizer(Number(qBits.value)), qReadout);
  if (!value) return;

  const span = 3.4;
  const ctx = clearCanvas(qCanvas);
  const f = frame(qCanvas, -span, span, -span, span);
  axes(ctx, qCanvas, f, "input sample", "output level");

  // Input density, shaded for scale intuition.
  ctx.beginPath();
  ctx.moveTo(f.x(-span), f.y(-span));
  for (let x = -span; x <= span; x += 0.02) {
    const pdf = Math.exp(-0.5 * x * x) / Math.sqrt(2 * Math.PI);
    ctx.lineTo(f.x(x), f.y(-span + pdf * 4.5));
  }
  ctx.lineTo(f.x(span), f.y(-span));
  ctx.closePath();
  ctx.fillStyle = "rgba(37, 99, 235, 0.08)";
  ctx.fill();

  // Identity reference.
  ctx.strokeStyle = "#cbd5e1";
  ctx.setLineDash([4, 4]);
  ctx.beginPath();
  ctx.moveTo(f.x(-span), f.y(-span));
  ctx.lineTo(f.x(span), f.y(span));
  ctx.stroke();
  ctx.setLineDash([]);

  // Staircase: level j applies between thresholds j-1 and j.
  const { levels, thresholds } = value;
  ctx.strokeStyle = "#2563eb";
  ctx.lineWidth = 2;
  ctx.beginPath();
  for (let j = 0; j < levels.length; j++) {
    const from = j === 0 ? -span : Math.max(-span, thresholds[j - 1]);
    const to = j === levels.length - 1 ? span : Math.min(span, thresholds[j]);
    if (to < -span || from > span) continue;
    ctx.moveTo(f.x(from), f.y(levels[j]));
    ctx.lineTo(f.x(to), f.y(levels[j]));
  }
  ctx.stroke();

  const beta = value.distortion;
  qReadout.innerHTML =
    `<strong>${levels.length}</strong> levels &middot; distortion factor ` +
    `&beta; = <strong>${beta.toPrecision(6)}</strong> &middot; ` +
    `per-stream rate ceiling log&#8322;(1/&beta;) = <strong>${Math.log2(1 / beta).toFixed(2)}</strong> bits`;
}

qBits.addEventListener("input", drawQuantizer);

// ---------------------------------------------------------------------------
// Panel 2: allocation bars
// ---------------------------------------------------------------------------

const aRun = document.getElementById("a-run");
const aCanvas = document.getElementById("a-canvas");
const aReadout = document.getElementById("a-readout");

function drawAllocation() {
  const value = parsed(
    allocate_streams(
      document.getElementById("a-singulars").value,
      Number(document.getElementById("a-power").value),
      1.0,
      Number(document.getElementById("a-bits").value),
      document.getElementById("a-scheme").value,
    ),
    aReadout,
  );
  if (!value) return;

  const streams = value.singulars.length;
  const solved = value.powers.length; // schemes may switch trailing streams off
  const maxPower = Math.max(...value.powers, 1e-9);
  const maxBits = Math.max(...value.bits, 1);
  const ctx = clearCanvas(aCanvas);
  const f = frame(aCanvas, 0, streams, 0, 1.15);
  axes(ctx, aCanvas, f, "stream (sorted by gain)", "share of maximum");

  for (let i = 0; i < streams; i++) {
    const power = i < solved ? value.powers[i] : 0;
    const bits = i < solved ? value.bits[i] : 0;
    const rate = i < solved ? value.stream_rates[i] : 0;
    const cx = i + 0.5;

    ctx.fillStyle = COLORS.jbp;
    ctx.fillRect(f.x(cx - 0.32), f.y(power / maxPower), 0.27 * (f.w / streams), f.y(0) - f.y(power / maxPower));
    ctx.fillStyle = COLORS.greedy;
    ctx.fillRect(f.x(cx + 0.05), f.y(bits / maxBits), 0.27 * (f.w / streams), f.y(0) - f.y(bits / maxBits));

    ctx.fillStyle = "#1c2430";
    ctx.font = "12px system-ui";
    ctx.textAlign = "center";
    ctx.fillText(`${rate.toFixed(2)} b/use`, f.x(cx), f.y(Math.max(power / maxPower, bits / maxBits)) - 6);
    ctx.fillStyle = "#5b6878";
    ctx.fillText(`p=${power.toFixed(2)}  b=${bits}`, f.x(cx), f.y(0) + 16);
  }

  const efficiency = (100 * value.sum_rate) / value.ideal_rate;
  aReadout.innerHTML =
    `sum rate <strong>${value.sum_rate.toFixed(3)}</strong> bits/use &middot; ` +
    `ideal bound ${value.ideal_rate.toFixed(3)} &middot; ` +
    `<strong>${efficiency.toFixed(1)}%</strong> of ideal &middot; ` +
    `${value.active_streams} active stream(s)`;
}

aRun.addEventListener("click", drawAllocation);

// ---------------------------------------------------------------------------
// Panel 3: sweep curves
// ---------------------------------------------------------------------------

const sRun = document.getElementById("s-run");
const sReal = document.getElementById("s-real");
const sRealValue = document.getElementById("s-real-value");
const sCanvas = document.getElementById("s-canvas");
const sReadout = document.getElementById("s-readout");

sReal.addEventListener("input", () => (sRealValue.textContent = sReal.value));

function drawSweep() {
  sRun.disabled = true;
  sReadout.textContent = "running Monte-Carlo sweep…";
  // Let the button repaint before the synchronous wasm call.
  setTimeout(() => {
    try {
      const value = parsed(
        sweep_curves(
          Number(document.getElementById("s-kappa").value),
          Number(document.getElementById("s-snr").value),
          Number(sReal.value),
          Number(document.getElementById("s-seed").value),
        ),
        sReadout,
      );
      if (!value) return;

      const budgets = value.budgets;
      const top = Math.max(...value.curves.flatMap((c) => c.rates)) * 1.08;
      const ctx = clearCanvas(sCanvas);
      const f = frame(sCanvas, budgets[0], budgets[budgets.length - 1], 0, top);
      axes(ctx, sCanvas, f, "total fronthaul bits per channel use", "mean sum rate (bits/use)");

      ctx.font = "12px system-ui";
      ctx.textAlign = "left";
      value.curves.forEach((curve, idx) => {
        const color = COLORS[curve.scheme] ?? "#334155";
        ctx.strokeStyle = color;
        ctx.lineWidth = curve.scheme === "ideal" ? 1.5 : 2;
        ctx.setLineDash(curve.scheme === "ideal" ? [6, 4] : []);
        ctx.beginPath();
        curve.rates.forEach((rate, i) => {
          const px = f.x(budgets[i]);
          const py = f.y(rate);
          if (i === 0) ctx.moveTo(px, py);
          else ctx.lineTo(px, py);
        });
        ctx.stroke();
        ctx.setLineDash([]);
        ctx.fillStyle = color;
        ctx.fillText(curve.scheme, f.box.left + 10, f.box.top + 16 + idx * 16);
      });

      const jbp = value.curves.find((c) => c.scheme === "jbp");
      const unaware = value.curves.find((c) => c.scheme === "unaware_wf");
      const worst = Math.min(...unaware.rates.map((r, i) => r / jbp.rates[i]));
      sReadout.innerHTML =
        `quantization-unaware water-filling drops to ` +
        `<strong>${(100 * worst).toFixed(1)}%</strong> of the joint scheme at its worst budget`;
    } finally {
      sRun.disabled = false;
    }
  }, 20);
}

sRun.addEventListener("click", drawSweep);

// ---------------------------------------------------------------------------

await init();
drawQuantizer();
drawAllocation();
drawSweep();
