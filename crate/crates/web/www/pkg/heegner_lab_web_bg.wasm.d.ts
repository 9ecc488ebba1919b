/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const admissibility_map_json: (a: number, b: number) => [number, number];
export const certificate_json: (a: number, b: number) => [number, number];
export const lattice_json: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
