// Drift-corrected fixed-cadence ticker. Each tick is scheduled against the
// absolute timeline started at start(), so timer jitter never accumulates;
// when the page stalls past one or more whole periods, the missed ticks are
// skipped rather than fired in a burst.

export interface SchedulerClock {
  now(): number; // monotonic milliseconds
  setTimer(cb: () => void, delayMs: number): unknown;
  clearTimer(handle: unknown): void;
}

export const FRAME_PERIOD_MS = 15;

export class FrameScheduler {
  private readonly emit: (tickIndex: number) => void;
  private readonly clock: SchedulerClock;
  private readonly periodMs: number;
  private handle: unknown = null;
  private origin = 0;
  private lastIndex = -1;
  private running = false;
  skipped = 0;
  emitted = 0;

  constructor(
    emit: (tickIndex: number) => void,
    clock: SchedulerClock,
    periodMs: number = FRAME_PERIOD_MS,
  ) {
    if (periodMs <= 0) {
      throw new Error(`period must be positive, got ${periodMs}`);
    }
    this.emit = emit;
    this.clock = clock;
    this.periodMs = periodMs;
  }

  get isRunning(): boolean {
    return this.running;
  }

  start(): void {
    if (this.running) return;
    this.running = true;
    this.origin = this.clock.now();
    this.lastIndex = -1;
    this.schedule();
  }

  stop(): void {
    this.running = false;
    if (this.handle !== null) {
      this.clock.clearTimer(this.handle);
      this.handle = null;
    }
  }

  private schedule(): void {
    const nextTime = this.origin + (this.lastIndex + 2) * this.periodMs;
    const delay = Math.max(0, nextTime - this.clock.now());
    this.handle = this.clock.setTimer(() => this.fire(), delay);
  }

  private fire(): void {
    if (!this.running) return;
    // Tick k nominally fires at origin + (k+1) * period, so the index due at
    // time `now` is one less than the number of whole periods elapsed. The
    // max() guard absorbs timers that fire a hair early.
    const due = Math.floor((this.clock.now() - this.origin) / this.periodMs) - 1;
    const index = Math.max(due, this.lastIndex + 1);
    this.skipped += index - (this.lastIndex + 1);
    this.lastIndex = index;
    this.emitted += 1;
    this.emit(index);
    if (this.running) {
      this.schedule();
    }
  }
}
