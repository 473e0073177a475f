/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_frames_free: (a: number, b: number) => void;
export const check_value: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const describe_pipe: () => [number, number, number, number];
export const frames_edges_height: (a: number) => number;
export const frames_edges_pixels: (a: number) => [number, number];
export const frames_edges_width: (a: number) => number;
export const frames_processed_height: (a: number) => number;
export const frames_processed_pixels: (a: number) => [number, number];
export const frames_processed_width: (a: number) => number;
export const run_pipeline: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
export const source_pixels: () => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
