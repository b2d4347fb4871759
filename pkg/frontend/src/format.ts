// Number formatting. The localized variant uses a comma decimal separator
// (and dot thousand grouping), matching the regional table convention.

let localized = true;

export function setLocalized(value: boolean): void {
  localized = value;
}

export function formatInt(value: number): string {
  const text = Math.trunc(value).toLocaleString("en-US");
  return localized ? text.replace(/,/g, ".") : text;
}

export function formatPercent(fraction: number, decimals = 1): string {
  const text = (fraction * 100).toFixed(decimals);
  return (localized ? text.replace(".", ",") : text) + "%";
}
