// === axis scales and tick generation ======================================

export interface Scale {
  log: boolean;
  domain: [number, number];
  range: [number, number];
  map(value: number): number;
  ticks(): number[];
}

function padDomain(lo: number, hi: number): [number, number] {
  if (lo === hi) {
    const pad = lo === 0 ? 1 : Math.abs(lo) * 0.1;
    return [lo - pad, hi + pad];
  }
  const pad = (hi - lo) * 0.05;
  return [lo - pad, hi + pad];
}

export function linearScale(values: number[], range: [number, number]): Scale {
  const [lo, hi] = padDomain(Math.min(...values), Math.max(...values));
  const span = hi - lo;
  return {
    log: false,
    domain: [lo, hi],
    range,
    map: (v) => range[0] + ((v - lo) / span) * (range[1] - range[0]),
    ticks: () => linearTicks(lo, hi),
  };
}

export function logScale(values: number[], range: [number, number]): Scale {
  const positive = values.filter((v) => v > 0);
  const logs = positive.map(Math.log);
  const [lo, hi] = padDomain(Math.min(...logs), Math.max(...logs));
  const span = hi - lo;
  return {
    log: true,
    domain: [Math.exp(lo), Math.exp(hi)],
    range,
    map: (v) => range[0] + ((Math.log(v) - lo) / span) * (range[1] - range[0]),
    ticks: () => logTicks(Math.exp(lo), Math.exp(hi)),
  };
}

export function linearTicks(lo: number, hi: number, count = 5): number[] {
  const span = hi - lo;
  const rawStep = span / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const norm = rawStep / mag;
  const step = (norm >= 5 ? 10 : norm >= 2 ? 5 : norm >= 1 ? 2 : 1) * mag;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

export function logTicks(lo: number, hi: number): number[] {
  const loExp = Math.ceil(Math.log10(lo) - 1e-9);
  const hiExp = Math.floor(Math.log10(hi) + 1e-9);
  const ticks: number[] = [];
  if (hiExp - loExp < 1) {
    // under one decade: fall back to linear ticks in the raw domain
    return linearTicks(lo, hi, 4).filter((v) => v > 0);
  }
  const stride = Math.max(1, Math.ceil((hiExp - loExp) / 8));
  for (let e = loExp; e <= hiExp; e += stride) {
    ticks.push(Math.pow(10, e));
  }
  return ticks;
}

export function formatTick(value: number): string {
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 1e5 || abs < 1e-4) {
    const exp = Math.floor(Math.log10(abs));
    const mant = value / Math.pow(10, exp);
    const m = Number(mant.toPrecision(3));
    return m === 1 ? `1e${exp}` : m === -1 ? `-1e${exp}` : `${m}e${exp}`;
  }
  return String(Number(value.toPrecision(6)));
}
