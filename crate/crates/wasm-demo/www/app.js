import init, {
  toy_example,
  check_contextual,
  reduce,
  measure_plan,
  peres_mermin,
} from "./pkg/csvqe_wasm.js";

const input = document.getElementById("input");
const output = document.getElementById("output");
const chart = document.getElementById("chart");

function show(text) {
  output.textContent = text;
}

function fail(err) {
  chart.hidden = true;
  show(`error: ${err.message ?? err}`);
}

// Bar chart of term counts with the energy error overlaid on a log scale.
function drawSweep(rows) {
  chart.hidden = false;
  const ctx = chart.getContext("2d");
  const w = chart.width, h = chart.height;
  ctx.clearRect(0, 0, w, h);
  const pad = { left: 60, right: 60, top: 24, bottom: 36 };
  const plotW = w - pad.left - pad.right;
  const plotH = h - pad.top - pad.bottom;
  const maxTerms = Math.max(...rows.map(r => r.terms), 1);
  const deltas = rows.map(r => Math.max(r.delta_e, 1e-16));
  const logMin = Math.log10(Math.max(Math.min(...deltas), 1e-16)) - 0.5;
  const logMax = Math.log10(Math.max(...deltas, 1e-12)) + 0.5;
  const slot = plotW / rows.length;

  ctx.font = "12px sans-serif";
  rows.forEach((row, i) => {
    const x = pad.left + i * slot;
    const barH = (row.terms / maxTerms) * plotH;
    ctx.fillStyle = "#b8cfe8";
    ctx.fillRect(x + slot * 0.2, pad.top + plotH - barH, slot * 0.6, barH);
    ctx.fillStyle = "#333";
    ctx.textAlign = "center";
    ctx.fillText(`${row.qubits}q`, x + slot / 2, h - pad.bottom + 16);
    ctx.fillText(`${row.terms}`, x + slot / 2, pad.top + plotH - barH - 4);
  });

  ctx.strokeStyle = "#c0392b";
  ctx.fillStyle = "#c0392b";
  ctx.beginPath();
  rows.forEach((row, i) => {
    const x = pad.left + i * slot + slot / 2;
    const frac = (Math.log10(Math.max(row.delta_e, 1e-16)) - logMin) / (logMax - logMin);
    const y = pad.top + plotH - frac * plotH;
    if (i === 0) ctx.moveTo(x, y); else ctx.lineTo(x, y);
  });
  ctx.stroke();
  rows.forEach((row, i) => {
    const x = pad.left + i * slot + slot / 2;
    const frac = (Math.log10(Math.max(row.delta_e, 1e-16)) - logMin) / (logMax - logMin);
    const y = pad.top + plotH - frac * plotH;
    ctx.beginPath();
    ctx.arc(x, y, 3, 0, 2 * Math.PI);
    ctx.fill();
  });

  ctx.fillStyle = "#333";
  ctx.textAlign = "left";
  ctx.fillText("bars: terms in the reduced operator", pad.left, 14);
  ctx.fillStyle = "#c0392b";
  ctx.fillText("line: |E - E_full| (log scale)", pad.left + 260, 14);
}

async function main() {
  await init();
  input.value = toy_example();
  show(`ready — observable-square demo: ${peres_mermin()}`);

  document.getElementById("btn-toy").onclick = () => {
    input.value = toy_example();
    chart.hidden = true;
    show("example restored");
  };
  document.getElementById("btn-check").onclick = () => {
    chart.hidden = true;
    try {
      show(check_contextual(input.value));
    } catch (err) { fail(err); }
  };
  document.getElementById("btn-reduce").onclick = () => {
    try {
      const method = document.getElementById("method").value;
      const legacy = document.getElementById("legacy").checked;
      const report = JSON.parse(reduce(input.value, method, legacy));
      drawSweep(report.rows);
      show(JSON.stringify(report, null, 2));
    } catch (err) { fail(err); }
  };
  document.getElementById("btn-measure").onclick = () => {
    chart.hidden = true;
    try {
      const epsilon = parseFloat(document.getElementById("epsilon").value) || 1e-3;
      show(measure_plan(input.value, epsilon));
    } catch (err) { fail(err); }
  };
}

main().catch(fail);
