// Pure view-model derivation from workspace documents.

import { describe, expect, it } from "vitest";

import { panesFrom, provenanceOf, referenceCounts } from "../src/viewmodel";
import { makeDoc, memory } from "./stub";

describe("panesFrom", () => {
  it("keeps card order equal to server ref order", () => {
    const panes = panesFrom(makeDoc());
    expect(panes[0].cards.map((c) => c.id)).toEqual(["m1", "m2", "m3", "m5"]);
    expect(panes[1].cards.map((c) => c.id)).toEqual(["m4", "m5"]);
  });

  it("carries visibility from the reference, not the object", () => {
    const cards = panesFrom(makeDoc())[0].cards;
    expect(cards.find((c) => c.id === "m2")!.visible).toBe(false);
    expect(cards.find((c) => c.id === "m1")!.visible).toBe(true);
  });

  it("sets the shared flag exactly when two or more conversations reference", () => {
    const panes = panesFrom(makeDoc());
    const shared = panes[0].cards.find((c) => c.id === "m5")!;
    const lonely = panes[0].cards.find((c) => c.id === "m1")!;
    expect(shared.shared).toBe(true);
    expect(lonely.shared).toBe(false);
  });

  it("marks only summaries expandable", () => {
    const doc = makeDoc();
    doc.pool.push(
      memory({ id: "s9", kind: "summary", role: "system", children: ["m1"] }),
    );
    doc.conversations[1].refs.push({ memory_id: "s9", visible: true });
    const panes = panesFrom(doc);
    expect(panes[1].cards.find((c) => c.id === "s9")!.expandable).toBe(true);
    expect(panes[1].cards.find((c) => c.id === "m4")!.expandable).toBe(false);
  });

  it("positions panes at their canvas coordinates", () => {
    const panes = panesFrom(makeDoc());
    expect(panes[0].position).toEqual({ x: 20, y: 30 });
    expect(panes[1].position).toEqual({ x: 420, y: 30 });
  });

  it("throws on a document with a dangling reference", () => {
    const doc = makeDoc();
    doc.conversations[0].refs.push({ memory_id: "ghost", visible: true });
    expect(() => panesFrom(doc)).toThrow(/ghost/);
  });
});

describe("provenance helpers", () => {
  it("counts references per memory across conversations", () => {
    const counts = referenceCounts(makeDoc());
    expect(counts.get("m5")).toBe(2);
    expect(counts.get("m1")).toBe(1);
  });

  it("lists referencing conversations in workspace order", () => {
    expect(provenanceOf(makeDoc(), "m5")).toEqual(["c1", "c2"]);
    expect(provenanceOf(makeDoc(), "m4")).toEqual(["c2"]);
    expect(provenanceOf(makeDoc(), "nope")).toEqual([]);
  });
});
