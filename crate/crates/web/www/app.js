import init, { scenario, marginals, policy } from "./pkg/jigsaw_web.js";

const $ = (id) => document.getElementById(id);
let current = null;

function config() {
  return JSON.stringify({ k: Number($("k").value), f: Number($("f").value) });
}

function guard(errId, fn) {
  $(errId).textContent = "";
  try {
    fn();
  } catch (e) {
    $(errId).textContent = String(e.message ?? e);
  }
}

function cellAt(s, row, col) {
  return s.objects.find((o) => o.row === row && o.col === col);
}

function drawBoard() {
  const s = current;
  const table = document.createElement("table");
  table.className = "grid";
  for (let r = 1; r <= s.rows; r++) {
    const tr = table.insertRow();
    for (let c = 1; c <= s.cols; c++) {
      const o = cellAt(s, r, c);
      const td = tr.insertCell();
      td.innerHTML = `${o.color} ${o.shape}<br><b>${o.letter}</b> / <b>${o.digit}</b>`;
      if (o.letter === s.goal.letter && o.digit === s.goal.digit) td.className = "goal";
    }
  }
  const caption = document.createElement("div");
  caption.className = "caption";
  caption.textContent = `goal ${s.goal.letter}${s.goal.digit}, ${s.first_player} moves first`;
  $("board").replaceChildren(wrap(caption, table));
}

function wrap(...nodes) {
  const div = document.createElement("div");
  div.append(...nodes);
  return div;
}

function heatmap(m, title) {
  const table = document.createElement("table");
  table.className = "grid";
  for (let r = 0; r < m.rows; r++) {
    const tr = table.insertRow();
    for (let c = 0; c < m.cols; c++) {
      const v = m.values[r * m.cols + c];
      const td = tr.insertCell();
      td.textContent = v.toFixed(3);
      td.style.background = `rgba(74, 123, 208, ${v.toFixed(3)})`;
      td.style.color = v > 0.6 ? "white" : "black";
    }
  }
  const caption = document.createElement("div");
  caption.className = "caption";
  caption.textContent = title;
  return wrap(caption, table);
}

function showMarginals() {
  guard("marginals-err", () => {
    const out = JSON.parse(
      marginals(JSON.stringify(current), $("actions").value, $("viewer").value, config(), $("unconstrained").checked),
    );
    const views = out.steps.map((st) => {
      const who = st.action === null ? "prior" : `t=${st.t}: ${st.actor} ${st.action}`;
      return heatmap(st.marginals, `${who}${st.fallback ? " (fallback)" : ""}`);
    });
    const note = document.createElement("div");
    note.className = "caption";
    note.textContent = `${out.viewer}'s belief that the partner holds each cell (level ${out.level})`;
    $("marginals").replaceChildren(note, ...views);
  });
}

function policyView() {
  return JSON.parse(policy(JSON.stringify(current), $("actions").value, $("policy").value, config()));
}

function showPolicy() {
  guard("policy-err", () => {
    const view = policyView();
    const table = document.createElement("table");
    table.className = "policy";
    for (const [action, p] of view.actions.slice(0, 12)) {
      const tr = table.insertRow();
      tr.insertCell().textContent = action;
      tr.insertCell().textContent = p.toFixed(4);
      const bar = document.createElement("span");
      bar.className = "bar";
      bar.style.width = `${Math.round(p * 300)}px`;
      tr.insertCell().append(bar);
    }
    const caption = document.createElement("div");
    caption.className = "caption";
    caption.textContent = `${view.player} to move at t=${view.t} under ${view.policy}; top ${Math.min(12, view.actions.length)} of ${view.actions.length}`;
    $("policy-out").replaceChildren(caption, table);
  });
}

function step() {
  guard("step-err", () => {
    const [best] = policyView().actions[0];
    const prev = $("actions").value.trim();
    $("actions").value = prev ? `${prev}, ${best}` : best;
    showMarginals();
    if (!best.startsWith("click")) showPolicy();
  });
}

function load() {
  guard("scenario-err", () => {
    current = JSON.parse(scenario(Number($("seed").value)));
    $("actions").value = "";
    drawBoard();
    $("marginals").replaceChildren();
    $("policy-out").replaceChildren();
  });
}

await init();
$("load").onclick = load;
$("run-marginals").onclick = showMarginals;
$("run-policy").onclick = showPolicy;
$("step").onclick = step;
load();
