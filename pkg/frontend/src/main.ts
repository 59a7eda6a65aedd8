// DOM wiring for the console: connects the controls to the console state,
// streams composed poses to the service at the frame cadence, and renders
// replies. All spotting and robot motion happens server-side; this file only
// composes frames and draws what comes back.

import {
  frameMessage,
  parseReply,
  parseTemplates,
  RESET,
  SENSOR_COUNT,
  type TemplateInfo,
} from "./protocol.js";
import { applyNoise, mulberry32 } from "./blend.js";
import {
  applyReply,
  composePose,
  initialState,
  markConnected,
  markConnecting,
  markDisconnected,
  takeFrameT,
  TRACE_LIMIT,
  type ConsoleState,
} from "./state.js";
import { FrameScheduler, FRAME_PERIOD_MS } from "./scheduler.js";
import { autoRange, dialAngle, stripPath, traceSeries } from "./charts.js";

const state: ConsoleState = initialState();
const templates = new Map<number, TemplateInfo>();
const rng = mulberry32(Date.now() >>> 0);
const sentAt = new Map<number, number>();

let socket: WebSocket | null = null;
let wantConnected = false;
let reconnectTimer: number | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const baseUrlInput = el<HTMLInputElement>("base-url");
const connectBtn = el<HTMLButtonElement>("connect");
const resetBtn = el<HTMLButtonElement>("reset-session");
const statusBadge = el<HTMLSpanElement>("status");
const latencySpan = el<HTMLSpanElement>("latency");
const queueSpan = el<HTMLSpanElement>("queue-depth");
const frameSpan = el<HTMLSpanElement>("frame-t");
const errorLine = el<HTMLDivElement>("error-line");
const presetABox = el<HTMLDivElement>("preset-a");
const presetBBox = el<HTMLDivElement>("preset-b");
const blendSlider = el<HTMLInputElement>("blend");
const blendValue = el<HTMLSpanElement>("blend-value");
const slidersBox = el<HTMLDivElement>("fine-sliders");
const clearOverridesBtn = el<HTMLButtonElement>("clear-overrides");
const noiseToggle = el<HTMLInputElement>("noise");
const sigmaInput = el<HTMLInputElement>("sigma");
const buttonToggle = el<HTMLInputElement>("glove-button");
const decisionBox = el<HTMLDivElement>("decision");
const commandBox = el<HTMLDivElement>("command");
const confidenceFill = el<HTMLDivElement>("confidence-fill");
const confidenceText = el<HTMLSpanElement>("confidence-text");
const vacuumLed = el<HTMLSpanElement>("vacuum");
const savedLed = el<HTMLSpanElement>("saved");

const fineSliders: HTMLInputElement[] = [];

function httpBase(): string {
  return baseUrlInput.value.trim().replace(/\/+$/, "");
}

function wsUrl(): string {
  return httpBase().replace(/^http/, "ws") + "/session";
}

function buildFineSliders(): void {
  slidersBox.textContent = "";
  fineSliders.length = 0;
  for (let i = 0; i < SENSOR_COUNT; i++) {
    const row = document.createElement("label");
    row.className = "fine-row";
    const name = document.createElement("span");
    name.textContent = `s${i + 1}`;
    const input = document.createElement("input");
    input.type = "range";
    input.min = "0";
    input.max = "1";
    input.step = "0.01";
    input.value = "0.5";
    input.addEventListener("input", () => {
      state.overrides.set(i, Number(input.value));
    });
    row.append(name, input);
    slidersBox.append(row);
    fineSliders.push(input);
  }
}

function reflectPoseInSliders(pose: number[]): void {
  for (let i = 0; i < fineSliders.length; i++) {
    if (!state.overrides.has(i)) {
      fineSliders[i].value = String(pose[i]);
    }
  }
}

function presetButton(box: HTMLDivElement, which: "A" | "B", info: TemplateInfo): HTMLButtonElement {
  const btn = document.createElement("button");
  btn.textContent = info.name || `G${info.label}`;
  btn.addEventListener("click", () => {
    if (which === "A") {
      state.presetA = info.label;
    } else {
      state.presetB = info.label;
    }
    state.overrides.clear();
    for (const other of box.querySelectorAll("button")) {
      other.classList.toggle("selected", other === btn);
    }
  });
  return btn;
}

function buildPresetButtons(): void {
  presetABox.textContent = "";
  presetBBox.textContent = "";
  const ordered = [...templates.values()].sort((a, b) => a.label - b.label);
  for (const info of ordered) {
    presetABox.append(presetButton(presetABox, "A", info));
    presetBBox.append(presetButton(presetBBox, "B", info));
  }
}

async function loadTemplates(): Promise<void> {
  const response = await fetch(httpBase() + "/templates");
  if (!response.ok) {
    throw new Error(`GET /templates failed: ${response.status}`);
  }
  templates.clear();
  for (const info of parseTemplates(await response.json())) {
    templates.set(info.label, info);
  }
  buildPresetButtons();
}

const scheduler = new FrameScheduler(
  () => {
    if (!socket || socket.readyState !== WebSocket.OPEN) return;
    let pose = composePose(state, templates);
    if (state.noise) {
      pose = applyNoise(pose, state.noiseSigma, rng);
    }
    reflectPoseInSliders(pose);
    const t = takeFrameT(state);
    sentAt.set(t, performance.now());
    if (sentAt.size > 512) {
      const oldest: number = sentAt.keys().next().value!;
      sentAt.delete(oldest);
    }
    socket.send(JSON.stringify(frameMessage(t, pose, state.button)));
  },
  {
    now: () => performance.now(),
    setTimer: (cb, delay) => window.setTimeout(cb, delay),
    clearTimer: (handle) => window.clearTimeout(handle as number),
  },
  FRAME_PERIOD_MS,
);

function connect(): void {
  wantConnected = true;
  if (reconnectTimer !== null) {
    window.clearTimeout(reconnectTimer);
    reconnectTimer = null;
  }
  markConnecting(state);
  loadTemplates()
    .then(() => {
      const ws = new WebSocket(wsUrl());
      socket = ws;
      ws.onopen = () => {
        markConnected(state);
        sentAt.clear();
        ws.send(JSON.stringify(RESET));
        scheduler.start();
      };
      ws.onmessage = (event) => {
        try {
          const reply = parseReply(String(event.data));
          let roundTrip: number | undefined;
          if (reply.type === "spot") {
            const sent = sentAt.get(reply.t);
            if (sent !== undefined) {
              roundTrip = performance.now() - sent;
              sentAt.delete(reply.t);
            }
          }
          applyReply(state, reply, roundTrip);
        } catch (err) {
          state.lastError = String(err);
        }
      };
      ws.onclose = () => {
        if (socket === ws) {
          dropConnection();
        }
      };
      ws.onerror = () => {
        // onclose follows and owns the cleanup
      };
    })
    .catch((err) => {
      state.lastError = String(err);
      dropConnection();
    });
}

function dropConnection(): void {
  scheduler.stop();
  socket = null;
  markDisconnected(state);
  if (wantConnected && reconnectTimer === null) {
    reconnectTimer = window.setTimeout(() => {
      reconnectTimer = null;
      if (wantConnected) connect();
    }, 1000);
  }
}

function disconnect(): void {
  wantConnected = false;
  if (reconnectTimer !== null) {
    window.clearTimeout(reconnectTimer);
    reconnectTimer = null;
  }
  const ws = socket;
  socket = null;
  scheduler.stop();
  if (ws) ws.close();
  markDisconnected(state);
}

connectBtn.addEventListener("click", () => {
  if (wantConnected) {
    disconnect();
  } else {
    connect();
  }
});

resetBtn.addEventListener("click", () => {
  if (socket && socket.readyState === WebSocket.OPEN) {
    socket.send(JSON.stringify(RESET));
  }
});

blendSlider.addEventListener("input", () => {
  state.blend = Number(blendSlider.value);
  state.overrides.clear();
});

clearOverridesBtn.addEventListener("click", () => {
  state.overrides.clear();
});

noiseToggle.addEventListener("change", () => {
  state.noise = noiseToggle.checked;
});

sigmaInput.addEventListener("change", () => {
  const sigma = Number(sigmaInput.value);
  if (Number.isFinite(sigma) && sigma >= 0) {
    state.noiseSigma = sigma;
  }
});

buttonToggle.addEventListener("change", () => {
  state.button = buttonToggle.checked;
});

const STRIP_W = 280;
const STRIP_H = 60;
const axes = ["x", "y", "z"].map((name) => ({
  line: el(`strip-${name}`).querySelector("polyline") as SVGPolylineElement,
  label: el<HTMLSpanElement>(`value-${name}`),
}));

function render(): void {
  statusBadge.textContent = state.connection;
  statusBadge.className = `badge ${state.connection}`;
  connectBtn.textContent = wantConnected ? "Disconnect" : "Connect";
  latencySpan.textContent = state.latencyMs === null ? "-" : `${state.latencyMs.toFixed(1)} ms`;
  queueSpan.textContent = String(state.queueDepth);
  frameSpan.textContent = String(state.nextT);
  blendValue.textContent = Number(blendSlider.value).toFixed(2);
  errorLine.textContent = state.lastError ?? "";

  const spot = state.lastSpot;
  decisionBox.textContent = spot ? spot.decision : "-";
  decisionBox.classList.toggle("noncomm", !!spot && spot.decision === "NonCommunicative");
  commandBox.textContent = spot && spot.command ? spot.command : "(no command)";
  const conf = spot?.confidence ?? null;
  confidenceFill.style.width = conf === null ? "0%" : `${(conf * 100).toFixed(1)}%`;
  confidenceText.textContent = conf === null ? "-" : conf.toFixed(3);

  for (let axis = 0; axis < 3; axis++) {
    const series = traceSeries(state.trace, (p) => p.position[axis]);
    const range = autoRange(series);
    axes[axis].line.setAttribute(
      "points",
      stripPath(series, STRIP_W, STRIP_H, range, TRACE_LIMIT),
    );
    axes[axis].label.textContent = series.length
      ? series[series.length - 1].toFixed(4)
      : "-";
  }
  const last = state.trace.length ? state.trace[state.trace.length - 1] : null;
  for (let axis = 0; axis < 3; axis++) {
    const needle = el(`dial-${"xyz"[axis]}`);
    const angle = last ? dialAngle(last.orientation[axis]) : 0;
    needle.style.transform = `rotate(${angle}deg)`;
  }
  vacuumLed.classList.toggle("on", !!last && last.vacuum);
  savedLed.classList.toggle("on", !!spot && spot.robot.saved);

  window.requestAnimationFrame(render);
}

buildFineSliders();
window.requestAnimationFrame(render);
