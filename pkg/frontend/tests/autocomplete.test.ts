import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { AutocompleteBox } from "../src/autocomplete.js";
import { stubFetch } from "./stub.js";
import suggestions from "./fixtures/autocomplete_covid.json";

function makeBox(routes: Parameters<typeof stubFetch>[0]) {
  const stub = stubFetch(routes);
  const root = document.createElement("div");
  document.body.appendChild(root);
  const submitted: string[] = [];
  const box = new AutocompleteBox(
    root,
    new ApiClient("", stub.fetch),
    (text) => submitted.push(text),
    200,
  );
  return { stub, root, box, submitted };
}

function type(root: HTMLElement, text: string) {
  const input = root.querySelector("input")!;
  input.value = text;
  input.dispatchEvent(new Event("input"));
}

describe("autocomplete box", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => {
    vi.useRealTimers();
    document.body.innerHTML = "";
  });

  it('typing "covid" then selecting inserts the semantic chip', async () => {
    const { root, box } = makeBox([
      { match: /\/entity\/autocomplete\?.*query=covid/, body: suggestions },
    ]);
    type(root, "covid");
    await vi.advanceTimersByTimeAsync(250);
    const items = root.querySelectorAll(".suggestion");
    expect(items.length).toBeGreaterThan(0);
    expect(items[0]!.getAttribute("data-key")).toBe("@DISEASE_COVID_19");
    items[0]!.dispatchEvent(new MouseEvent("mousedown"));
    expect(box.queryText()).toBe("@DISEASE_COVID_19");
    expect(root.querySelector(".chip")!.textContent).toContain("@DISEASE_COVID_19");
  });

  it("debounces: one request for a burst of keystrokes", async () => {
    const { stub, root } = makeBox([
      { match: /\/entity\/autocomplete/, body: suggestions },
    ]);
    type(root, "co");
    type(root, "cov");
    type(root, "covi");
    type(root, "covid");
    await vi.advanceTimersByTimeAsync(250);
    expect(stub.calls.length).toBe(1);
    expect(stub.calls[0]).toContain("query=covid");
  });

  it("shows no dropdown when nothing matches", async () => {
    const { root } = makeBox([{ match: /\/entity\/autocomplete/, body: [] }]);
    type(root, "zz");
    await vi.advanceTimersByTimeAsync(250);
    expect((root.querySelector(".suggestions") as HTMLElement).hidden).toBe(true);
  });

  it("keeps the raw text and shows a notice when the lookup fails", async () => {
    const { root, box } = makeBox([{ match: /\/entity\/autocomplete/, body: [], fail: true }]);
    type(root, "covid");
    await vi.advanceTimersByTimeAsync(250);
    const notice = root.querySelector(".notice") as HTMLElement;
    expect(notice.hidden).toBe(false);
    expect(box.queryText()).toBe("covid");
  });

  it("deleting the chip restores keyword search for the raw text", async () => {
    const { root, box } = makeBox([
      { match: /\/entity\/autocomplete/, body: suggestions },
    ]);
    type(root, "covid");
    await vi.advanceTimersByTimeAsync(250);
    root.querySelector(".suggestion")!.dispatchEvent(new MouseEvent("mousedown"));
    expect(box.queryText()).toBe("@DISEASE_COVID_19");
    (root.querySelector(".chip button") as HTMLButtonElement).click();
    expect(box.queryText()).toBe("covid");
  });
});
