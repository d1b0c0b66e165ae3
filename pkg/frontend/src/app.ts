import {
  ApiError,
  buildSimilarUrl,
  DEBOUNCE_MS,
  debounce,
  getJson,
  newestWins,
  SUPERSEDED,
} from "./api.js";
import {
  currentQuery,
  filterEpisodes,
  initialState,
  measureInfo,
  requestFailed,
  requestStarted,
  requestSucceeded,
  selectItem,
  setK,
  setLevel,
  setMeasure,
  setSearch,
  setSoftness,
  withCatalog,
} from "./state.js";
import {
  renderBanner,
  renderEpisodeOptions,
  renderMeasureOptions,
  renderResults,
  renderSoftnessControl,
} from "./render.js";
import type {
  ItemsResponse,
  MeasuresResponse,
  SimilarQuery,
  SimilarResponse,
} from "./types.js";

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

const searchInput = byId<HTMLInputElement>("episode-search");
const episodeSelect = byId<HTMLSelectElement>("episode-list");
const measureSelect = byId<HTMLSelectElement>("measure");
const levelWrap = byId<HTMLElement>("level-wrap");
const levelSelect = byId<HTMLSelectElement>("level");
const softnessWrap = byId<HTMLElement>("softness-wrap");
const kInput = byId<HTMLInputElement>("kval");
const banner = byId<HTMLElement>("banner");
const results = byId<HTMLElement>("results");

let state = initialState();
let renderedMeasure: string | null = null;

const fetchSimilar = newestWins<SimilarQuery, SimilarResponse>((query, signal) =>
  getJson<SimilarResponse>(buildSimilarUrl(query), fetch, signal),
);

function render(): void {
  episodeSelect.innerHTML = renderEpisodeOptions(
    filterEpisodes(state.items, state.search),
    state.selectedItem,
  );
  if (measureSelect.options.length !== state.measures.length) {
    measureSelect.innerHTML = renderMeasureOptions(state.measures, state.measure);
  }
  if (measureSelect.value !== state.measure) measureSelect.value = state.measure;

  const info = measureInfo(state);
  levelWrap.hidden = !(info?.takes_level ?? false);
  if (levelSelect.value !== state.level) levelSelect.value = state.level;

  // Rebuild the softness input only on measure switches so typing keeps focus.
  if (renderedMeasure !== state.measure) {
    softnessWrap.innerHTML = renderSoftnessControl(info, state.softness);
    renderedMeasure = state.measure;
  }
  const softness = document.getElementById("softness") as HTMLInputElement | null;
  if (softness && state.softness !== null && softness.value !== String(state.softness)) {
    softness.value = String(state.softness);
  }
  if (kInput.value !== String(state.k)) kInput.value = String(state.k);

  banner.innerHTML = renderBanner(state.status, state.error);
  results.innerHTML = renderResults(state.response);
}

async function issue(): Promise<void> {
  const query = currentQuery(state);
  if (!query) return;
  state = requestStarted(state);
  render();
  let outcome: SimilarResponse | typeof SUPERSEDED;
  try {
    outcome = await fetchSimilar(query);
  } catch (err) {
    const message = err instanceof ApiError ? err.message : "request failed";
    state = requestFailed(state, message);
    render();
    return;
  }
  if (outcome === SUPERSEDED) return;
  state = requestSucceeded(state, outcome);
  render();
}

const schedule = debounce(() => {
  void issue();
}, DEBOUNCE_MS);

function choose(itemId: string): void {
  const next = selectItem(state, itemId);
  if (next === state) return;
  state = next;
  render();
  schedule();
}

searchInput.addEventListener("input", () => {
  state = setSearch(state, searchInput.value);
  render();
});

episodeSelect.addEventListener("change", () => {
  choose(episodeSelect.value);
});

measureSelect.addEventListener("change", () => {
  state = setMeasure(state, measureSelect.value);
  render();
  schedule();
});

levelSelect.addEventListener("change", () => {
  state = setLevel(state, levelSelect.value);
  render();
  schedule();
});

softnessWrap.addEventListener("change", (ev) => {
  const target = ev.target as HTMLInputElement;
  if (target.id !== "softness") return;
  state = setSoftness(state, Number(target.value));
  render();
  schedule();
});

kInput.addEventListener("change", () => {
  state = setK(state, Number(kInput.value));
  render();
  schedule();
});

results.addEventListener("click", (ev) => {
  const row = (ev.target as HTMLElement).closest("tr[data-item]");
  const itemId = row?.getAttribute("data-item");
  if (itemId) choose(itemId);
});

banner.addEventListener("click", (ev) => {
  if ((ev.target as HTMLElement).dataset?.action !== "retry") return;
  if (state.items.length === 0) {
    void boot();
  } else {
    void issue();
  }
});

async function boot(): Promise<void> {
  banner.innerHTML = renderBanner("loading", null);
  try {
    const [items, measures] = await Promise.all([
      getJson<ItemsResponse>("/api/items"),
      getJson<MeasuresResponse>("/api/measures"),
    ]);
    state = withCatalog(state, items.items, measures.measures);
  } catch (err) {
    const message =
      err instanceof ApiError ? err.message : "failed to load the episode catalog";
    state = requestFailed(state, message);
  }
  render();
}

void boot();
