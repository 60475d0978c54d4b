import init, { expand_formula, compute_scenario, verify_codim } from "./pkg/blowup_chern_web.js";

const $ = (id) => document.getElementById(id);

function show(id, run) {
  const out = $(id);
  try {
    out.textContent = run();
    out.className = "";
  } catch (e) {
    out.textContent = String(e);
    out.className = "error";
  }
}

function wire() {
  $("expand-run").onclick = () =>
    show("expand-out", () =>
      expand_formula($("formula").value, Number($("codim").value), Number($("excess").value), $("twist").value));

  $("preset").onchange = () => { $("scenario").value = $("preset").value; };
  $("scenario").value = $("preset").value;
  $("compute-run").onclick = () => show("compute-out", () => compute_scenario($("scenario").value));

  $("verify-run").onclick = () => {
    $("verify-out").textContent = "running...";
    // let the page repaint before the synchronous check
    setTimeout(() => show("verify-out", () => verify_codim(Number($("verify-d").value))), 10);
  };
}

init().then(() => {
  $("status").textContent = "Exact rational arithmetic; everything runs in this page.";
  wire();
}).catch((e) => {
  $("status").textContent = `Failed to load the engine: ${e}`;
});
