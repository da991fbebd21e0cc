// Client-side fuzzy evaluation, mirroring the service's inference rules
// (min conjunction, max aggregation per output label, singleton weighted
// average). Used for slider curve previews and for checking streamed
// velocities against the controller definitions in tests.
import type { Controller, Membership } from "./protocol.js";

export function membershipDegree(mf: Membership, x: number): number {
  const p = mf.points;
  switch (mf.shape) {
    case "tri": {
      const [a, b, c] = p;
      if (x === b) return 1;
      if (x <= a || x >= c) return 0;
      return x < b ? (x - a) / (b - a) : (c - x) / (c - b);
    }
    case "trap": {
      const [a, b, c, d] = p;
      if (x >= b && x <= c) return 1;
      if (x <= a || x >= d) return 0;
      return x < b ? (x - a) / (b - a) : (d - x) / (d - c);
    }
    case "lshoulder": {
      const [a, b] = p;
      if (x <= a) return 1;
      if (x >= b) return 0;
      return (b - x) / (b - a);
    }
    case "rshoulder": {
      const [a, b] = p;
      if (x >= b) return 1;
      if (x <= a) return 0;
      return (x - a) / (b - a);
    }
  }
}

/** Crisp output (rad/s) for the given inputs, NaN when no rule fires. */
export function evaluate(controller: Controller, inputs: Record<string, number>): number {
  const degrees: Record<string, Record<string, number>> = {};
  for (const input of controller.inputs) {
    let x = inputs[input.name];
    if (x === undefined) return NaN;
    if (x < input.lo) x = input.lo;
    if (x > input.hi) x = input.hi;
    const row: Record<string, number> = {};
    for (const label of input.labels) row[label.name] = membershipDegree(label, x);
    degrees[input.name] = row;
  }
  const strengths: Record<string, number> = {};
  for (const rule of controller.rules) {
    let s = 1;
    for (const clause of rule.if) {
      const d = degrees[clause.var]?.[clause.label];
      if (d === undefined) return NaN;
      if (d < s) s = d;
    }
    const label = rule.then.label;
    if (s > (strengths[label] ?? 0)) strengths[label] = s;
  }
  let num = 0;
  let den = 0;
  for (const single of controller.output.singletons) {
    const s = strengths[single.name] ?? 0;
    num += s * single.value;
    den += s;
  }
  return den === 0 ? NaN : num / den;
}

/** Uniform 1D sweep of a single-input controller, for slider previews. */
export function sampleCurve(
  controller: Controller,
  resolution: number,
): { xs: number[]; ys: number[] } {
  const input = controller.inputs[0];
  const xs: number[] = [];
  const ys: number[] = [];
  for (let i = 0; i < resolution; i++) {
    const x = input.lo + ((input.hi - input.lo) * i) / (resolution - 1);
    xs.push(x);
    ys.push(evaluate(controller, { [input.name]: x }));
  }
  return { xs, ys };
}
