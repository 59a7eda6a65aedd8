// Wire types for the spotting service: one frame message out, one reply back
// per frame, plus the reset handshake and the template listing. This module
// is the single source of truth for message shapes on the browser side.

export const SENSOR_COUNT = 22;

export interface FrameMessage {
  type: "frame";
  t: number;
  sensors: number[];
  button: boolean;
}

export interface ResetMessage {
  type: "reset";
}

export interface RobotSnapshot {
  t: number;
  position: number[];
  orientation: number[];
  vacuum: boolean;
  active_command: string | null;
  saved: boolean;
}

export interface SpotReply {
  type: "spot";
  t: number;
  decision: string; // "G<k>" or "NonCommunicative"
  label: string | null;
  confidence: number | null;
  command: string | null;
  robot: RobotSnapshot;
  queue_depth: number;
}

export interface ResetDoneReply {
  type: "reset_done";
  queue_depth: number;
}

export interface ErrorReply {
  type: "error";
  message: string;
  queue_depth: number;
}

export type ServerReply = SpotReply | ResetDoneReply | ErrorReply;

export interface TemplateInfo {
  label: number;
  name: string;
  pose: number[];
}

export function frameMessage(t: number, sensors: number[], button: boolean): FrameMessage {
  if (!Number.isInteger(t) || t < 0) {
    throw new Error(`frame t must be a non-negative integer, got ${t}`);
  }
  if (sensors.length !== SENSOR_COUNT) {
    throw new Error(`expected ${SENSOR_COUNT} sensors, got ${sensors.length}`);
  }
  for (const v of sensors) {
    if (!Number.isFinite(v)) {
      throw new Error("sensor values must be finite numbers");
    }
  }
  return { type: "frame", t, sensors: sensors.slice(), button };
}

export const RESET: ResetMessage = { type: "reset" };

function asObject(value: unknown, what: string): Record<string, unknown> {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    throw new Error(`${what} must be a JSON object`);
  }
  return value as Record<string, unknown>;
}

function asNumber(value: unknown, what: string): number {
  if (typeof value !== "number" || !Number.isFinite(value)) {
    throw new Error(`${what} must be a finite number`);
  }
  return value;
}

function numberArray(value: unknown, what: string): number[] {
  if (!Array.isArray(value)) {
    throw new Error(`${what} must be an array`);
  }
  return value.map((v, i) => asNumber(v, `${what}[${i}]`));
}

function parseRobot(value: unknown): RobotSnapshot {
  const obj = asObject(value, "robot snapshot");
  return {
    t: asNumber(obj.t, "robot.t"),
    position: numberArray(obj.position, "robot.position"),
    orientation: numberArray(obj.orientation, "robot.orientation"),
    vacuum: Boolean(obj.vacuum),
    active_command: obj.active_command == null ? null : String(obj.active_command),
    saved: Boolean(obj.saved),
  };
}

export function parseReply(text: string): ServerReply {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    throw new Error(`reply is not valid JSON: ${err}`);
  }
  const obj = asObject(raw, "reply");
  const depth = asNumber(obj.queue_depth ?? 0, "queue_depth");
  switch (obj.type) {
    case "spot":
      return {
        type: "spot",
        t: asNumber(obj.t, "t"),
        decision: String(obj.decision),
        label: obj.label == null ? null : String(obj.label),
        confidence: obj.confidence == null ? null : asNumber(obj.confidence, "confidence"),
        command: obj.command == null ? null : String(obj.command),
        robot: parseRobot(obj.robot),
        queue_depth: depth,
      };
    case "reset_done":
      return { type: "reset_done", queue_depth: depth };
    case "error":
      return { type: "error", message: String(obj.message ?? ""), queue_depth: depth };
    default:
      throw new Error(`unknown reply type ${JSON.stringify(obj.type)}`);
  }
}

export function parseTemplates(raw: unknown): TemplateInfo[] {
  const obj = asObject(raw, "template document");
  if (!Array.isArray(obj.templates)) {
    throw new Error("template document must carry a 'templates' array");
  }
  return obj.templates.map((entry, i) => {
    const e = asObject(entry, `templates[${i}]`);
    const pose = numberArray(e.pose, `templates[${i}].pose`);
    if (pose.length !== SENSOR_COUNT) {
      throw new Error(`templates[${i}].pose must have ${SENSOR_COUNT} values, got ${pose.length}`);
    }
    return {
      label: asNumber(e.label, `templates[${i}].label`),
      name: String(e.name ?? `G${e.label}`),
      pose,
    };
  });
}
