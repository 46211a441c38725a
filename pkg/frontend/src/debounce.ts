/** Debounce + latest-wins helpers for slider-driven image refetches. */

export interface Debounced<A extends unknown[]> {
  (...args: A): void;
  cancel(): void;
  flush(): void;
}

export function debounce<A extends unknown[]>(fn: (...args: A) => void, waitMs: number): Debounced<A> {
  let timer: ReturnType<typeof setTimeout> | null = null;
  let pending: A | null = null;
  const debounced = (...args: A) => {
    pending = args;
    if (timer !== null) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = null;
      const args2 = pending!;
      pending = null;
      fn(...args2);
    }, waitMs);
  };
  debounced.cancel = () => {
    if (timer !== null) clearTimeout(timer);
    timer = null;
    pending = null;
  };
  debounced.flush = () => {
    if (timer !== null && pending !== null) {
      clearTimeout(timer);
      timer = null;
      const args = pending;
      pending = null;
      fn(...args);
    }
  };
  return debounced;
}

/** Monotonic ticket dispenser: responses for stale tickets are discarded. */
export class LatestWins {
  private ticket = 0;

  next(): number {
    return ++this.ticket;
  }

  isCurrent(ticket: number): boolean {
    return ticket === this.ticket;
  }
}
