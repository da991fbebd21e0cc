// Page glue: WebSocket plumbing, DOM controls, animation loop.
// All state lives in the Session; this file only reads it on animation
// ticks and forwards user input as patch/command messages.
import { renderChart } from "./chart.js";
import { renderScene } from "./draw.js";
import { sampleCurve } from "./fuzzy.js";
import { Session } from "./session.js";
import { dimsFrom } from "./skeleton.js";
import {
  fromWire,
  parameterSpecs,
  toWire,
  wireValueAt,
  type ParameterSpec,
} from "./sliders.js";

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

const sceneCanvas = byId<HTMLCanvasElement>("scene");
const chartCanvas = byId<HTMLCanvasElement>("chart");
const slidersRoot = byId<HTMLDivElement>("sliders");
const toastsRoot = byId<HTMLDivElement>("toasts");
const statusLabel = byId<HTMLSpanElement>("status");
const fpsLabel = byId<HTMLSpanElement>("fps");
const terrainSelect = byId<HTMLSelectElement>("terrain");
const stepInput = byId<HTMLInputElement>("step-length");
const stepLabel = byId<HTMLSpanElement>("step-label");
const deltaToggle = byId<HTMLInputElement>("show-delta");

function toast(text: string): void {
  const el = document.createElement("div");
  el.className = "toast";
  el.textContent = text;
  toastsRoot.appendChild(el);
  setTimeout(() => el.remove(), 4000);
}

interface SliderEntry {
  spec: ParameterSpec;
  input: HTMLInputElement;
  readout: HTMLSpanElement;
  redraw: () => void;
}

const sliderEntries = new Map<string, SliderEntry>();

const session = new Session({
  onStatus: (status) => {
    statusLabel.textContent = status;
    statusLabel.className = `status ${status}`;
  },
  onToast: toast,
  onControllersChanged: () => {
    if (sliderEntries.size === 0) rebuildSliders();
  },
  onHello: () => {
    rebuildSliders();
    const config = session.hello?.config;
    if (!config) return;
    terrainSelect.value = config.terrain.kind;
    stepInput.value = config.step_length.toFixed(2);
    stepLabel.textContent = `${config.step_length.toFixed(2)} m`;
  },
  onPatchSettled: (path, accepted) => {
    const entry = sliderEntries.get(path);
    if (!entry) return;
    entry.input.classList.remove("unconfirmed");
    const committed = session.hello
      ? wireValueAt(session.hello.controllers.controllers, path)
      : undefined;
    if (committed !== undefined) {
      entry.spec.value = fromWire(entry.spec, committed);
    }
    if (!accepted) {
      // snap back to the committed value the service still holds
      entry.input.value = String(entry.spec.value);
    }
    entry.readout.textContent = `${entry.spec.value.toFixed(1)} ${entry.spec.unitSuffix}`;
    if (accepted) entry.redraw();
  },
});

// -- controls

byId<HTMLButtonElement>("pause").onclick = () => session.pause();
byId<HTMLButtonElement>("resume").onclick = () => session.resume();
byId<HTMLButtonElement>("reset").onclick = () => session.reset();

terrainSelect.onchange = () => {
  const kind = terrainSelect.value;
  if (kind === "stairs") session.setTerrain({ kind, riser: 0.17, tread: 0.28 });
  else if (kind === "incline") session.setTerrain({ kind, angle: 0.12 });
  else session.setTerrain({ kind: "flat" });
};

stepInput.oninput = () => {
  const value = parseFloat(stepInput.value);
  stepLabel.textContent = `${value.toFixed(2)} m`;
  session.setStepLength(value);
};

const jointBoxes = Array.from(
  document.querySelectorAll<HTMLInputElement>("input[data-joint]"),
);
function selectedJoints(): string[] {
  return jointBoxes.filter((b) => b.checked).map((b) => b.dataset.joint as string);
}

// -- sliders

function rebuildSliders(): void {
  const hello = session.hello;
  if (!hello) return;
  slidersRoot.textContent = "";
  sliderEntries.clear();
  const specs = parameterSpecs(hello.controllers.controllers);
  const groups = new Map<string, ParameterSpec[]>();
  for (const spec of specs) {
    const list = groups.get(spec.group) ?? [];
    list.push(spec);
    groups.set(spec.group, list);
  }
  for (const [group, list] of groups) {
    const details = document.createElement("details");
    const summary = document.createElement("summary");
    summary.textContent = group;
    details.appendChild(summary);
    const preview = document.createElement("canvas");
    preview.width = 220;
    preview.height = 60;
    preview.className = "preview";
    details.appendChild(preview);
    const controllerName = group.split(" / ")[0];
    const redraw = () => drawPreview(preview, controllerName);
    details.ontoggle = redraw;
    for (const spec of list) {
      details.appendChild(sliderRow(spec, redraw));
    }
    slidersRoot.appendChild(details);
  }
}

function sliderRow(spec: ParameterSpec, redraw: () => void): HTMLElement {
  const row = document.createElement("label");
  row.className = "slider-row";
  const name = document.createElement("span");
  name.textContent = spec.label;
  const input = document.createElement("input");
  input.type = "range";
  input.min = String(spec.min);
  input.max = String(spec.max);
  input.step = String(spec.step);
  input.value = String(spec.value);
  const readout = document.createElement("span");
  readout.className = "readout";
  readout.textContent = `${spec.value.toFixed(1)} ${spec.unitSuffix}`;
  input.oninput = () => {
    const display = parseFloat(input.value);
    readout.textContent = `${display.toFixed(1)} ${spec.unitSuffix}`;
    input.classList.add("unconfirmed");
    session.editParameter(spec.path, toWire(spec, display));
  };
  sliderEntries.set(spec.path, { spec, input, readout, redraw });
  row.append(name, input, readout);
  return row;
}

function drawPreview(canvas: HTMLCanvasElement, controllerName: string): void {
  const controller = session.controller(controllerName);
  const ctx = canvas.getContext("2d");
  if (!controller || !ctx || controller.inputs.length !== 1) return;
  const { xs, ys } = sampleCurve(controller, 120);
  const finite = ys.filter((y) => Number.isFinite(y));
  if (!finite.length) return;
  const lo = Math.min(...finite, 0);
  const hi = Math.max(...finite, 0);
  ctx.fillStyle = "#0c0f14";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#e8c547";
  ctx.lineWidth = 1.2;
  ctx.beginPath();
  xs.forEach((x, i) => {
    const px = ((x - xs[0]) / (xs[xs.length - 1] - xs[0])) * canvas.width;
    const py = canvas.height - ((ys[i] - lo) / (hi - lo || 1)) * (canvas.height - 6) - 3;
    if (i === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  });
  ctx.stroke();
}

// -- animation loop

const sceneCtx = sceneCanvas.getContext("2d")!;
const chartCtx = chartCanvas.getContext("2d")!;
let framesDrawn = 0;
let fpsWindowStart = performance.now();

function tick(): void {
  const dims = dimsFrom(session.hello?.config.dims);
  const terrain = session.hello?.config.terrain ?? { kind: "flat" as const };
  renderScene(
    sceneCtx,
    {
      width: sceneCanvas.width,
      height: sceneCanvas.height,
      dims,
      terrain,
      dimmed: session.status !== "connected",
    },
    session.lastFrame,
  );
  renderChart(
    chartCtx,
    {
      width: chartCanvas.width,
      height: chartCanvas.height,
      windowSeconds: 6,
      joints: selectedJoints(),
      showDelta: deltaToggle.checked,
    },
    session.frames,
  );
  framesDrawn += 1;
  const now = performance.now();
  if (now - fpsWindowStart >= 1000) {
    fpsLabel.textContent = `${framesDrawn} fps`;
    framesDrawn = 0;
    fpsWindowStart = now;
  }
  requestAnimationFrame(tick);
}
requestAnimationFrame(tick);

// -- socket (last: everything above must exist before messages arrive)

const params = new URLSearchParams(window.location.search);
const port = params.get("port") ?? "7341";
const host = params.get("host") ?? "127.0.0.1";

function connect(): void {
  const ws = new WebSocket(`ws://${host}:${port}/ws`);
  session.attach({ send: (text) => ws.send(text) });
  ws.onmessage = (ev) => session.receive(String(ev.data));
  ws.onclose = () => {
    session.disconnected();
    setTimeout(connect, 1500);
  };
  ws.onerror = () => ws.close();
}
connect();
