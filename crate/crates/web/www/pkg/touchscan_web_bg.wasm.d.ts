/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_scanpreview_free: (a: number, b: number) => void;
export const scanWing: (a: number, b: number, c: number, d: number) => [number, number, number];
export const scanpreview_cols: (a: number) => number;
export const scanpreview_crossSection: (a: number, b: number) => [number, number];
export const scanpreview_points: (a: number) => [number, number];
export const scanpreview_rows: (a: number) => number;
export const scanpreview_triangles: (a: number) => number;
export const solveArm: (a: number, b: number, c: number) => [number, number, number, number];
export const sphereTest: (a: number, b: number, c: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
