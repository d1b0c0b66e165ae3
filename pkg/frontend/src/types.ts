export interface EpisodeRef {
  item_id: string;
  title: string;
  series: string;
  season: number;
  episode: number;
}

export interface MeasureInfo {
  token: string;
  family: "set" | "ontology" | "text" | "cf";
  label: string;
  takes_p: boolean;
  takes_level: boolean;
  p_default?: number;
  p_grid?: number[];
  p_min?: number;
  p_max?: number;
  p_integer?: boolean;
  levels?: string[];
  aliases?: string[];
}

export interface SharedTheme {
  name: string;
  domain: string;
}

export interface SimilarEntry {
  rank: number;
  item_id: string;
  title: string;
  series: string;
  score: number;
  shared_themes: SharedTheme[];
}

export interface SimilarResponse {
  query_item: string;
  measure: string;
  level: string;
  results: SimilarEntry[];
}

export interface ItemsResponse {
  count: number;
  items: EpisodeRef[];
}

export interface MeasuresResponse {
  measures: MeasureInfo[];
}

export interface SimilarQuery {
  item: string;
  measure: string;
  k: number;
  p: number | null;
  level: string;
}
