import type {
  EpisodeRef,
  MeasureInfo,
  SimilarQuery,
  SimilarResponse,
} from "./types.js";

export const K_MIN = 1;
export const K_MAX = 50;
export const DEFAULT_MEASURE = "cosidf";
export const DEFAULT_LEVEL = "central";
export const DEFAULT_K = 10;

export type Status = "boot" | "idle" | "loading" | "ready" | "error";

export interface ExplorerState {
  items: EpisodeRef[];
  measures: MeasureInfo[];
  selectedItem: string | null;
  measure: string;
  level: string;
  softness: number | null;
  k: number;
  search: string;
  status: Status;
  error: string | null;
  response: SimilarResponse | null;
}

export function initialState(): ExplorerState {
  return {
    items: [],
    measures: [],
    selectedItem: null,
    measure: DEFAULT_MEASURE,
    level: DEFAULT_LEVEL,
    softness: null,
    k: DEFAULT_K,
    search: "",
    status: "boot",
    error: null,
    response: null,
  };
}

export function measureInfo(
  state: ExplorerState,
  token?: string,
): MeasureInfo | null {
  const wanted = token ?? state.measure;
  return state.measures.find((m) => m.token === wanted) ?? null;
}

export function withCatalog(
  state: ExplorerState,
  items: EpisodeRef[],
  measures: MeasureInfo[],
): ExplorerState {
  return { ...state, items, measures, status: "idle", error: null };
}

export function setSearch(state: ExplorerState, search: string): ExplorerState {
  return { ...state, search };
}

export function selectItem(state: ExplorerState, itemId: string): ExplorerState {
  if (!state.items.some((e) => e.item_id === itemId)) return state;
  return { ...state, selectedItem: itemId };
}

export function setMeasure(state: ExplorerState, token: string): ExplorerState {
  const info = measureInfo(state, token);
  if (!info) return state;
  // Switching to a softness-aware measure restarts p at that measure's default.
  const softness = info.takes_p ? (info.p_default ?? null) : null;
  return { ...state, measure: token, softness };
}

export function setLevel(state: ExplorerState, level: string): ExplorerState {
  return { ...state, level };
}

export function clampSoftness(info: MeasureInfo, value: number): number {
  let v = info.p_integer ? Math.round(value) : value;
  if (info.p_min !== undefined) v = Math.max(info.p_min, v);
  if (info.p_max !== undefined) v = Math.min(info.p_max, v);
  return v;
}

export function setSoftness(state: ExplorerState, value: number): ExplorerState {
  const info = measureInfo(state);
  if (!info || !info.takes_p || !Number.isFinite(value)) return state;
  return { ...state, softness: clampSoftness(info, value) };
}

export function setK(state: ExplorerState, value: number): ExplorerState {
  if (!Number.isFinite(value)) return state;
  const k = Math.min(K_MAX, Math.max(K_MIN, Math.round(value)));
  return { ...state, k };
}

export function requestStarted(state: ExplorerState): ExplorerState {
  return { ...state, status: "loading", error: null };
}

export function requestSucceeded(
  state: ExplorerState,
  response: SimilarResponse,
): ExplorerState {
  return { ...state, status: "ready", error: null, response };
}

export function requestFailed(state: ExplorerState, message: string): ExplorerState {
  return { ...state, status: "error", error: message };
}

export function filterEpisodes(items: EpisodeRef[], search: string): EpisodeRef[] {
  const needle = search.trim().toLowerCase();
  if (!needle) return items;
  return items.filter((e) =>
    `${e.title} ${e.item_id} ${e.series}`.toLowerCase().includes(needle),
  );
}

export function currentQuery(state: ExplorerState): SimilarQuery | null {
  if (!state.selectedItem) return null;
  const info = measureInfo(state);
  if (!info) return null;
  let measure = info.token;
  let p: number | null = null;
  if (info.takes_p && state.softness !== null) {
    if (info.family === "text") {
      // The latent-factor rank rides inside the token; a separate p would clash.
      measure = `${info.token.split(":")[0]}:${Math.round(state.softness)}`;
    } else {
      p = state.softness;
    }
  }
  return { item: state.selectedItem, measure, k: state.k, p, level: state.level };
}
