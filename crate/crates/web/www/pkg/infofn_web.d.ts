/* tslint:disable */
/* eslint-disable */

/**
 * Processed and edge images of one demo run.
 */
export class Frames {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    edges_height(): number;
    edges_pixels(): Uint8Array;
    edges_width(): number;
    processed_height(): number;
    processed_pixels(): Uint8Array;
    processed_width(): number;
}

/**
 * Validates `value_json` against the type expression `expr`.
 */
export function check_value(expr: string, value_json: string): string;

/**
 * Tab-separated description of the experiment pipe.
 */
export function describe_pipe(): string;

/**
 * Runs the experiment pipe on the bundled 64×64 image.
 */
export function run_pipeline(x0: number, y0: number, w: number, h: number, denoise: string, scale: number, edge: string): Frames;

/**
 * Pixels of the bundled source image (64×64, row-major).
 */
export function source_pixels(): Uint8Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_frames_free: (a: number, b: number) => void;
    readonly check_value: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly describe_pipe: () => [number, number, number, number];
    readonly frames_edges_height: (a: number) => number;
    readonly frames_edges_pixels: (a: number) => [number, number];
    readonly frames_edges_width: (a: number) => number;
    readonly frames_processed_height: (a: number) => number;
    readonly frames_processed_pixels: (a: number) => [number, number];
    readonly frames_processed_width: (a: number) => number;
    readonly run_pipeline: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
    readonly source_pixels: () => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
