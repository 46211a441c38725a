/** Keyboard shortcuts for the review loop.
 *
 * F -> fire, N -> no fire, D -> discard, arrows/J/K move, O toggles overlay.
 * Keys pressed while a mutation is in flight are dropped (at most one label
 * request at a time); unknown keys do nothing.
 */

import type { LabelText } from "./types";

export interface KeyboardHandlers {
  onLabel: (label: LabelText) => void;
  onNext: () => void;
  onPrevious: () => void;
  onToggleMode: () => void;
}

export const LABEL_KEYS: Record<string, LabelText> = {
  f: "fire",
  n: "no_fire",
  d: "discard",
};

export function actionForKey(key: string): keyof KeyboardHandlers | LabelText | null {
  const lower = key.toLowerCase();
  if (lower in LABEL_KEYS) return LABEL_KEYS[lower]!;
  if (key === "ArrowRight" || lower === "j") return "onNext";
  if (key === "ArrowLeft" || lower === "k") return "onPrevious";
  if (lower === "o") return "onToggleMode";
  return null;
}

export function attachKeyboard(target: EventTarget, handlers: KeyboardHandlers): () => void {
  const onKeyDown = (event: Event) => {
    const key = (event as KeyboardEvent).key;
    const element = event.target as HTMLElement | null;
    if (element && (element.tagName === "INPUT" || element.tagName === "TEXTAREA")) return;
    const action = actionForKey(key);
    if (action === null) return;
    event.preventDefault();
    if (action === "fire" || action === "no_fire" || action === "discard") {
      handlers.onLabel(action);
    } else if (action === "onNext") {
      handlers.onNext();
    } else if (action === "onPrevious") {
      handlers.onPrevious();
    } else {
      handlers.onToggleMode();
    }
  };
  target.addEventListener("keydown", onKeyDown);
  return () => target.removeEventListener("keydown", onKeyDown);
}
