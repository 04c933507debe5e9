// Rolling sample buffer behind the live plot.  Samples arrive from two
// sources after a reload -- the trace download and the live stream -- so
// insertion dedupes on the timestamp.  CSV timestamps carry 9 significant
// digits while the stream sends full doubles; keying on whole microseconds
// makes the two representations collide as intended.

import type { Sample } from "./types.js";

const keyOf = (s: Sample): number => Math.round(s.time_s * 1e6);

export class SampleBuffer {
  private samples: Sample[] = [];
  private keys = new Set<number>();

  constructor(public readonly capacity = 2000) {}

  get length(): number {
    return this.samples.length;
  }

  /** Ordered by time; do not mutate. */
  list(): readonly Sample[] {
    return this.samples;
  }

  clear(): void {
    this.samples = [];
    this.keys.clear();
  }

  /** Insert one sample; returns false on a duplicate timestamp. */
  push(sample: Sample): boolean {
    const key = keyOf(sample);
    if (this.keys.has(key)) return false;
    this.keys.add(key);
    // fast path: samples almost always arrive in time order
    const last = this.samples[this.samples.length - 1];
    if (last === undefined || sample.time_s >= last.time_s) {
      this.samples.push(sample);
    } else {
      let lo = 0;
      let hi = this.samples.length;
      while (lo < hi) {
        const mid = (lo + hi) >> 1;
        if ((this.samples[mid] as Sample).time_s <= sample.time_s) lo = mid + 1;
        else hi = mid;
      }
      this.samples.splice(lo, 0, sample);
    }
    if (this.samples.length > this.capacity) {
      const dropped = this.samples.splice(0, this.samples.length - this.capacity);
      for (const d of dropped) this.keys.delete(keyOf(d));
    }
    return true;
  }

  pushMany(samples: Iterable<Sample>): number {
    let added = 0;
    for (const s of samples) if (this.push(s)) added++;
    return added;
  }
}
