import init, { lattice_json, certificate_json, admissibility_map_json } from "./pkg/heegner_lab_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseInt($(id).value, 10) || 0;
const badge = (ok) => `<span class="${ok ? "pass" : "fail"}">${ok ? "PASS" : "FAIL"}</span>`;
const esc = (s) => String(s).replace(/[&<>]/g, (c) => ({ "&": "&amp;", "<": "&lt;", ">": "&gt;" })[c]);

function showError(summary, out, v) {
  summary.innerHTML = `<span class="fail">${esc(v.error)}</span>`;
  out.textContent = "";
}

function runLattice() {
  const tol = parseFloat($("lat-tol").value);
  const v = JSON.parse(lattice_json($("lat-name").value, num("lat-n"), num("lat-delta"), num("lat-d"), tol));
  const summary = $("lat-summary");
  if (v.error) return showError(summary, $("lat-out"), v);
  let html = `<p>rank ${v.rank}, signature (${v.signature.join(", ")}), det ${esc(v.det)}, ` +
    `|D| = ${v.order}, invariant factors [${v.discriminant.divisors.join(", ")}], level ${v.level}</p>`;
  if (v.weil.error) {
    html += `<p>Weil representation: ${esc(v.weil.error)}</p>`;
  } else {
    const c = v.weil.check;
    html += `<p>Weil representation: dim ${c.dim}, weight ${esc(c.weight)}, T order ${c.t_order} ${badge(v.weil.pass)}</p><table>`;
    html += "<tr><th>relation</th><th>max deviation</th><th></th></tr>";
    for (const r of c.relations.checks) {
      html += `<tr><td>${esc(r.relation)}</td><td>${r.max_deviation.toExponential(2)}</td><td>${badge(r.pass)}</td></tr>`;
    }
    html += "</table>";
  }
  summary.innerHTML = html;
  $("lat-out").textContent = JSON.stringify(v.discriminant, null, 1);
}

function runCertificate() {
  const v = JSON.parse(certificate_json(num("cert-g"), num("cert-n")));
  const summary = $("cert-summary");
  if (v.error) return showError(summary, $("cert-out"), v);
  let html = `<p>g = ${v.g}, d = ${v.d}, Fourier–Mukai partners ${v.fm_partner_count}, ` +
    `best exponent ${v.best_exponent}</p><table><tr><th>route</th><th>exponent</th><th>multiplier</th><th>constant</th></tr>`;
  for (const r of v.routes) {
    html += `<tr><td>${esc(r.route)}</td><td>${r.exponent}</td><td>${esc(r.multiplier.expr)} = ${r.multiplier.value}</td><td>${esc(r.constant)}</td></tr>`;
  }
  summary.innerHTML = html + "</table>";
  $("cert-out").textContent = JSON.stringify(v.routes, null, 1);
}

let mapRows = [];
let mapCols = 1;
let cell = 1;

function colour(r) {
  if (r.a) return "#1f77b4";
  if (r.b) return "#ff7f0e";
  if (r.c > 0) return "#2ca02c";
  return "#ddd";
}

function drawMap() {
  const v = JSON.parse(admissibility_map_json(num("map-g"), 0));
  if (v.error) {
    $("map-info").innerHTML = `<span class="fail">${esc(v.error)}</span>`;
    return;
  }
  mapRows = v.rows;
  const canvas = $("map");
  mapCols = Math.ceil(Math.sqrt(mapRows.length * 2));
  cell = Math.max(1, Math.floor(canvas.width / mapCols));
  const rows = Math.ceil(mapRows.length / mapCols);
  canvas.height = rows * cell;
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  mapRows.forEach((r, i) => {
    ctx.fillStyle = colour(r);
    ctx.fillRect((i % mapCols) * cell, Math.floor(i / mapCols) * cell, cell, cell);
  });
  const counts = { a: 0, b: 0, c: 0 };
  for (const r of mapRows) {
    if (r.a) counts.a++;
    if (r.b) counts.b++;
    if (r.c > 0) counts.c++;
  }
  $("map-info").textContent = `g ≤ ${v.g_max}: A holds for ${counts.a}, B for ${counts.b}, C for ${counts.c} genera. Hover over a cell.`;
}

function hoverMap(ev) {
  const rect = ev.target.getBoundingClientRect();
  const x = Math.floor((ev.clientX - rect.left) / cell);
  const y = Math.floor((ev.clientY - rect.top) / cell);
  const r = mapRows[y * mapCols + x];
  if (x < mapCols && r) {
    $("map-info").textContent = `g = ${r.g}, d = ${r.d}: A ${r.a ? "yes" : "no"}, B ${r.b ? "yes" : "no"}, C witnesses ${r.c}`;
  }
}

async function main() {
  await init();
  $("status").textContent = "Ready.";
  $("lat-go").addEventListener("click", runLattice);
  $("cert-go").addEventListener("click", runCertificate);
  $("map-go").addEventListener("click", drawMap);
  $("map").addEventListener("mousemove", hoverMap);
  runLattice();
  runCertificate();
  drawMap();
}

main().catch((e) => {
  $("status").textContent = `Failed to load: ${e}`;
});
