/* tslint:disable */
/* eslint-disable */

/**
 * A finished wing scan, laid out row-major by (column, row).
 */
export class ScanPreview {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    cols(): number;
    /**
     * x, true z, measured z down column `k` (1-based), plus the target
     * profile sampled every 0.5 mm along the same line.
     */
    crossSection(k: number): Float64Array;
    /**
     * x, y, measured z for every probe in scan order.
     */
    points(): Float64Array;
    rows(): number;
    triangles(): number;
}

export function scanWing(spacing: number, sigma: number, drift: number, seed: number): ScanPreview;

export function solveArm(x: number, y: number, z: number): Float64Array;

export function sphereTest(diameter: number, sigma: number, seed: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_scanpreview_free: (a: number, b: number) => void;
    readonly scanWing: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly scanpreview_cols: (a: number) => number;
    readonly scanpreview_crossSection: (a: number, b: number) => [number, number];
    readonly scanpreview_points: (a: number) => [number, number];
    readonly scanpreview_rows: (a: number) => number;
    readonly scanpreview_triangles: (a: number) => number;
    readonly solveArm: (a: number, b: number, c: number) => [number, number, number, number];
    readonly sphereTest: (a: number, b: number, c: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
