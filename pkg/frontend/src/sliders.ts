// Parameter descriptors derived from the hello payload. Every breakpoint
// and output singleton becomes one slider addressed by the same
// dotted-path grammar the service's patch endpoint accepts, so freshly
// authored controllers show up without UI changes.
import type { Controller } from "./protocol.js";

const DEG = 180 / Math.PI;

export interface ParameterSpec {
  path: string;
  label: string;
  group: string;
  /** multiply a wire (radian) value by this for display */
  displayFactor: number;
  unitSuffix: string;
  min: number; // display units
  max: number;
  step: number;
  value: number; // committed value, display units
}

export function parameterSpecs(controllers: readonly Controller[]): ParameterSpec[] {
  const specs: ParameterSpec[] = [];
  for (const c of controllers) {
    for (const input of c.inputs) {
      const factor = input.unit === "deg" ? DEG : 1;
      const lo = input.lo * factor;
      const hi = input.hi * factor;
      const margin = 0.1 * (hi - lo);
      for (const label of input.labels) {
        const letters = ["a", "b", "c", "d"];
        label.points.forEach((value, i) => {
          specs.push({
            path: `${c.name}.input.${input.name}.${label.name}.${letters[i]}`,
            label: `${label.name}.${letters[i]}`,
            group: `${c.name} / ${input.name}`,
            displayFactor: factor,
            unitSuffix: input.unit === "deg" ? "deg" : "",
            min: lo - margin,
            max: hi + margin,
            step: (hi - lo) / 400,
            value: value * factor,
          });
        });
      }
    }
    const values = c.output.singletons.map((s) => s.value * DEG);
    const span = Math.max(60, 1.6 * Math.max(...values.map(Math.abs)));
    for (const single of c.output.singletons) {
      specs.push({
        path: `${c.name}.output.${c.output.name}.${single.name}`,
        label: single.name,
        group: `${c.name} / ${c.output.name}`,
        displayFactor: DEG,
        unitSuffix: "deg/s",
        min: -span,
        max: span,
        step: span / 200,
        value: single.value * DEG,
      });
    }
  }
  return specs;
}

export function toWire(spec: ParameterSpec, displayValue: number): number {
  return displayValue / spec.displayFactor;
}

export function fromWire(spec: ParameterSpec, wireValue: number): number {
  return wireValue * spec.displayFactor;
}

/** Resolve a dotted parameter path against a controllers dump. */
export function wireValueAt(
  controllers: readonly Controller[],
  path: string,
): number | undefined {
  const parts = path.split(".");
  const controller = controllers.find((c) => c.name === parts[0]);
  if (!controller) return undefined;
  if (parts[1] === "output" && parts.length === 4) {
    return controller.output.singletons.find((s) => s.name === parts[3])?.value;
  }
  if (parts[1] === "input" && parts.length === 5) {
    const input = controller.inputs.find((v) => v.name === parts[2]);
    const label = input?.labels.find((l) => l.name === parts[3]);
    const index = { a: 0, b: 1, c: 2, d: 3 }[parts[4] as "a" | "b" | "c" | "d"];
    if (label && index !== undefined) return label.points[index];
  }
  return undefined;
}
