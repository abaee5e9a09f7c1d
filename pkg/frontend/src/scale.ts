/** Axis scales and tick generation; everything here must be deterministic. */

export interface Scale {
  (value: number): number;
  ticks: number[];
  domain: [number, number];
}

function niceStep(span: number, target: number): number {
  const rough = span / target;
  const power = Math.pow(10, Math.floor(Math.log10(rough)));
  for (const mult of [1, 2, 5, 10]) {
    if (mult * power >= rough) return mult * power;
  }
  return 10 * power;
}

export function linearScale(min: number, max: number, rangeLo: number, rangeHi: number): Scale {
  if (!(max > min)) {
    // degenerate domain: pad it so a single x value still renders
    const pad = Math.abs(min) > 0 ? Math.abs(min) * 0.5 : 1;
    min -= pad;
    max += pad;
  }
  const step = niceStep(max - min, 5);
  const lo = Math.floor(min / step) * step;
  const hi = Math.ceil(max / step) * step;
  const ticks: number[] = [];
  for (let v = lo; v <= hi + step * 1e-9; v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  const scale = ((value: number) =>
    rangeLo + ((value - lo) / (hi - lo)) * (rangeHi - rangeLo)) as Scale;
  scale.ticks = ticks;
  scale.domain = [lo, hi];
  return scale;
}

export function logScale(min: number, max: number, rangeLo: number, rangeHi: number): Scale {
  if (min <= 0) {
    throw new Error(`log axis requires positive values, got ${min}`);
  }
  const loExp = Math.floor(Math.log10(min) + 1e-12);
  let hiExp = Math.ceil(Math.log10(max) - 1e-12);
  if (hiExp === loExp) hiExp = loExp + 1;
  const ticks: number[] = [];
  for (let e = loExp; e <= hiExp; e += 1) {
    ticks.push(Math.pow(10, e));
  }
  const scale = ((value: number) =>
    rangeLo + ((Math.log10(value) - loExp) / (hiExp - loExp)) * (rangeHi - rangeLo)) as Scale;
  scale.ticks = ticks;
  scale.domain = [Math.pow(10, loExp), Math.pow(10, hiExp)];
  return scale;
}

/** Fixed-notation label that echoes the numeric value compactly. */
export function tickLabel(value: number, log: boolean): string {
  if (log) {
    const exp = Math.round(Math.log10(value));
    if (Math.abs(value - Math.pow(10, exp)) / value < 1e-9) {
      return exp >= 0 && exp <= 4 ? String(Math.pow(10, exp)) : `1e${exp}`;
    }
  }
  return String(Number(value.toPrecision(10)));
}
