// JSON contract of the prediction service, consumed verbatim.

export interface AirportNode {
  code: string;
  lat: number;
  lon: number;
  alt: number;
}

export interface EdgeFeatures {
  betweenness: number;
  flow_betweenness: number;
  edge_connectivity: number;
  dd_src: number;
  dd_dst: number;
  google_entry: number;
}

export interface NetworkEdge {
  src: string;
  dst: string;
  weight: number;
  features: EdgeFeatures;
}

export interface NetworkResponse {
  nodes: AirportNode[];
  edges: NetworkEdge[];
}

export interface ScenarioRequest {
  origin: string;
  destination: string;
  flight_hour: number;
  wind_dir_deg: number;
  wind_speed_kt: number;
  visibility_m: number;
  temperature_c: number;
  cloud_cover_octas: number;
  fc_wind_dir_deg: number;
  fc_wind_speed_kt: number;
  fc_visibility_m: number;
  fc_temperature_c: number;
  runway_head_change: boolean;
  runway_config_change: boolean;
  request_id?: string | null;
}

export interface PredictionResponse {
  request_id: string | null;
  holding_probability: number;
  predicted_delay_s: number;
  model_versions: Record<string, string>;
  unseen_route: boolean;
  graph_features_used: EdgeFeatures | null;
}

export interface FieldError {
  field: string;
  message: string;
}

/** Numeric scenario fields a sweep can range over. */
export type SweepableField =
  | "flight_hour"
  | "wind_dir_deg"
  | "wind_speed_kt"
  | "visibility_m"
  | "temperature_c"
  | "cloud_cover_octas"
  | "fc_wind_dir_deg"
  | "fc_wind_speed_kt"
  | "fc_visibility_m"
  | "fc_temperature_c";
