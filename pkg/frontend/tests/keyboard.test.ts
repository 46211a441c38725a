// @vitest-environment jsdom
import { describe, expect, it, vi } from "vitest";

import { actionForKey, attachKeyboard } from "../src/keyboard";

function press(key: string, target?: EventTarget) {
  const event = new KeyboardEvent("keydown", { key, bubbles: true });
  (target ?? document).dispatchEvent(event);
}

function handlers() {
  return {
    onLabel: vi.fn(),
    onNext: vi.fn(),
    onPrevious: vi.fn(),
    onToggleMode: vi.fn(),
  };
}

describe("actionForKey", () => {
  it("maps the review keys, case-insensitively", () => {
    expect(actionForKey("f")).toBe("fire");
    expect(actionForKey("F")).toBe("fire");
    expect(actionForKey("n")).toBe("no_fire");
    expect(actionForKey("d")).toBe("discard");
    expect(actionForKey("ArrowRight")).toBe("onNext");
    expect(actionForKey("k")).toBe("onPrevious");
    expect(actionForKey("o")).toBe("onToggleMode");
  });

  it("ignores everything else", () => {
    for (const key of ["x", "Enter", " ", "1", "Escape"]) {
      expect(actionForKey(key)).toBeNull();
    }
  });
});

describe("attachKeyboard", () => {
  it("routes label keys and navigation", () => {
    const h = handlers();
    const detach = attachKeyboard(document, h);
    press("f");
    press("N");
    press("ArrowLeft");
    detach();
    expect(h.onLabel).toHaveBeenNthCalledWith(1, "fire");
    expect(h.onLabel).toHaveBeenNthCalledWith(2, "no_fire");
    expect(h.onPrevious).toHaveBeenCalledTimes(1);
  });

  it("unknown keys trigger no handler (and no request)", () => {
    const h = handlers();
    const detach = attachKeyboard(document, h);
    press("z");
    press("Enter");
    detach();
    expect(h.onLabel).not.toHaveBeenCalled();
    expect(h.onNext).not.toHaveBeenCalled();
  });

  it("does not fire while typing in an input", () => {
    const h = handlers();
    const detach = attachKeyboard(document, h);
    const input = document.createElement("input");
    document.body.append(input);
    press("f", input);
    detach();
    input.remove();
    expect(h.onLabel).not.toHaveBeenCalled();
  });

  it("stops after detach", () => {
    const h = handlers();
    attachKeyboard(document, h)();
    press("f");
    expect(h.onLabel).not.toHaveBeenCalled();
  });
});
