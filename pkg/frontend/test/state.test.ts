import { describe, expect, it } from "vitest";
import {
  clampSoftness,
  currentQuery,
  DEFAULT_K,
  DEFAULT_LEVEL,
  DEFAULT_MEASURE,
  filterEpisodes,
  initialState,
  K_MAX,
  K_MIN,
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
  type ExplorerState,
} from "../src/state.js";
import type { EpisodeRef, MeasureInfo, SimilarResponse } from "../src/types.js";

const EPISODES: EpisodeRef[] = [
  { item_id: "voy3x05", title: "False Profits", series: "VOY", season: 3, episode: 5 },
  { item_id: "tng4x13", title: "Devil's Due", series: "TNG", season: 4, episode: 13 },
  { item_id: "tos1x04", title: "The Naked Time", series: "TOS", season: 1, episode: 4 },
];

const LEVELS = ["central", "peripheral", "both"];

const MEASURES: MeasureInfo[] = [
  {
    token: "cosidf", family: "set", label: "Cosine (IDF-weighted)",
    takes_p: false, takes_level: true, levels: LEVELS, aliases: ["cosine"],
  },
  {
    token: "lch", family: "ontology", label: "LCH (soft cosine)",
    takes_p: true, takes_level: true, p_default: 4,
    p_grid: [0.5, 1, 2, 4, 8, 20], p_min: 0.1, p_max: 20, levels: LEVELS,
  },
  {
    token: "lsi:40", family: "text", label: "Transcript LSI cosine",
    takes_p: true, takes_level: false, p_default: 40,
    p_min: 1, p_max: 452, p_integer: true,
  },
  {
    token: "cf", family: "cf", label: "Rating co-occurrence (Pearson)",
    takes_p: false, takes_level: false,
  },
];

function ready(): ExplorerState {
  return withCatalog(initialState(), EPISODES, MEASURES);
}

describe("initial state", () => {
  it("starts on the default cosine measure at the central level", () => {
    const s = initialState();
    expect(s.measure).toBe(DEFAULT_MEASURE);
    expect(s.level).toBe(DEFAULT_LEVEL);
    expect(s.k).toBe(DEFAULT_K);
    expect(s.selectedItem).toBeNull();
    expect(s.softness).toBeNull();
    expect(s.status).toBe("boot");
  });

  it("becomes idle once the catalog arrives", () => {
    const s = ready();
    expect(s.status).toBe("idle");
    expect(s.items).toHaveLength(3);
    expect(measureInfo(s)?.token).toBe("cosidf");
  });
});

describe("selection", () => {
  it("accepts known episode ids", () => {
    const s = selectItem(ready(), "tng4x13");
    expect(s.selectedItem).toBe("tng4x13");
  });

  it("ignores unknown ids", () => {
    const s = ready();
    expect(selectItem(s, "ds9x99")).toBe(s);
  });
});

describe("measure switching", () => {
  it("seeds the softness default when the measure takes p", () => {
    const s = setMeasure(ready(), "lch");
    expect(s.measure).toBe("lch");
    expect(s.softness).toBe(4);
  });

  it("clears softness when the measure takes no p", () => {
    const s = setMeasure(setMeasure(ready(), "lch"), "cosidf");
    expect(s.softness).toBeNull();
  });

  it("ignores tokens missing from the catalog", () => {
    const s = ready();
    expect(setMeasure(s, "sorensen")).toBe(s);
  });
});

describe("softness and k", () => {
  it("clamps softness into the measure's range", () => {
    const s = setMeasure(ready(), "lch");
    expect(setSoftness(s, 100).softness).toBe(20);
    expect(setSoftness(s, 0).softness).toBe(0.1);
    expect(setSoftness(s, 2.5).softness).toBe(2.5);
  });

  it("rounds integer-only softness values", () => {
    const s = setMeasure(ready(), "lsi:40");
    expect(setSoftness(s, 12.6).softness).toBe(13);
    expect(setSoftness(s, 0.2).softness).toBe(1);
  });

  it("refuses softness on measures without p", () => {
    const s = ready();
    expect(setSoftness(s, 4)).toBe(s);
    expect(setSoftness(s, Number.NaN)).toBe(s);
  });

  it("keeps k inside its bounds", () => {
    const s = ready();
    expect(setK(s, 0).k).toBe(K_MIN);
    expect(setK(s, 999).k).toBe(K_MAX);
    expect(setK(s, 17.4).k).toBe(17);
    expect(setK(s, Number.NaN)).toBe(s);
  });

  it("exposes clampSoftness for control syncing", () => {
    const lch = MEASURES[1];
    expect(clampSoftness(lch, 50)).toBe(20);
    expect(clampSoftness(lch, 1)).toBe(1);
  });
});

describe("episode filtering", () => {
  it("matches title, id, and series case-insensitively", () => {
    expect(filterEpisodes(EPISODES, "devil")).toHaveLength(1);
    expect(filterEpisodes(EPISODES, "VOY3")).toHaveLength(1);
    expect(filterEpisodes(EPISODES, "tos")).toHaveLength(1);
    expect(filterEpisodes(EPISODES, "zzz")).toHaveLength(0);
  });

  it("returns everything for blank search text", () => {
    expect(filterEpisodes(EPISODES, "  ")).toHaveLength(3);
  });
});

describe("query building", () => {
  it("needs a selection first", () => {
    expect(currentQuery(ready())).toBeNull();
  });

  it("builds the default cosine query", () => {
    const s = selectItem(ready(), "voy3x05");
    expect(currentQuery(s)).toEqual({
      item: "voy3x05", measure: "cosidf", k: 10, p: null, level: "central",
    });
  });

  it("sends softness as p for ontology measures", () => {
    const s = setMeasure(selectItem(ready(), "voy3x05"), "lch");
    expect(currentQuery(s)).toMatchObject({ measure: "lch", p: 4 });
  });

  it("folds the rank into the token for latent-factor measures", () => {
    let s = setMeasure(selectItem(ready(), "voy3x05"), "lsi:40");
    s = setSoftness(s, 12);
    expect(currentQuery(s)).toMatchObject({ measure: "lsi:12", p: null });
  });
});

describe("request lifecycle", () => {
  const response: SimilarResponse = {
    query_item: "voy3x05", measure: "cosidf", level: "central", results: [],
  };

  it("walks loading to ready", () => {
    let s = requestStarted(selectItem(ready(), "voy3x05"));
    expect(s.status).toBe("loading");
    s = requestSucceeded(s, response);
    expect(s.status).toBe("ready");
    expect(s.response).toBe(response);
    expect(s.error).toBeNull();
  });

  it("records failures with their message", () => {
    const s = requestFailed(requestStarted(ready()), "caches are still building");
    expect(s.status).toBe("error");
    expect(s.error).toBe("caches are still building");
  });
});

describe("purity", () => {
  it("never mutates the previous state", () => {
    const s = Object.freeze(ready());
    setSearch(s, "devil");
    selectItem(s, "tng4x13");
    setMeasure(s, "lch");
    setLevel(s, "both");
    setK(s, 25);
    requestStarted(s);
    expect(s.search).toBe("");
    expect(s.selectedItem).toBeNull();
    expect(s.measure).toBe("cosidf");
    expect(s.k).toBe(DEFAULT_K);
  });
});
