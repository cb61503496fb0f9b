// Wire types mirroring the steering service's JSON payloads. The UI renders
// these verbatim; it never derives a score or intelligence value itself.

export interface MazePayload {
  name: string;
  width: number;
  height: number;
  rows: string[];
}

export interface PosePayload {
  x: number;
  y: number;
  orientation: "up" | "down" | "left" | "right";
}

export interface StatePayload {
  schema_version: number;
  session_id: string;
  maze: MazePayload;
  pose: PosePayload;
  sensors: string[];
  learning: boolean;
  transitions_recorded: number;
}

export interface DistributionPayload {
  labels: string[];
  probs: number[];
}

export interface SessionEvent {
  seq: number;
  type: "session";
  state: StatePayload;
}

export interface ActionEvent {
  seq: number;
  type: "action";
  action: string;
  sensors_before: string[];
  prediction: DistributionPayload[];
  sensors_after: string[];
  pm: number;
  pose: PosePayload;
  learning: boolean;
}

export interface LearningEvent {
  seq: number;
  type: "learning";
  enabled: boolean;
}

export interface IntelligenceEvent {
  seq: number;
  type: "intelligence";
  umwelts: string[];
  pm_per_umwelt: Record<string, number>;
  joint_factor: number;
  pm_total: number;
  intelligence: number;
  compressor: string;
  schema_version?: number;
}

export type StreamEvent = SessionEvent | ActionEvent | LearningEvent | IntelligenceEvent;

export interface ActionResponse extends Omit<ActionEvent, "seq" | "type"> {
  schema_version: number;
  seq: number;
}
