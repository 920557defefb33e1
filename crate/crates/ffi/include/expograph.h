#ifndef EXPOGRAPH_H
#define EXPOGRAPH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success.
 */
typedef enum ExpoStatus {
  EXPO_STATUS_OK = 0,
  EXPO_STATUS_NULL_POINTER = 1,
  EXPO_STATUS_INVALID_UTF8 = 2,
  /**
   * The scene text is not valid scene JSON.
   */
  EXPO_STATUS_INVALID_SCENE = 3,
  /**
   * The input parsed but violates a constraint, e.g. `|1 - alpha| >= 1`.
   */
  EXPO_STATUS_CONSTRAINT_VIOLATION = 4,
  EXPO_STATUS_INVALID_ARGUMENT = 5,
  /**
   * The iteration denominator vanished.
   */
  EXPO_STATUS_SINGULAR = 6,
  EXPO_STATUS_NON_FINITE = 7,
  /**
   * The root finder gave up.
   */
  EXPO_STATUS_NO_CONVERGENCE = 8,
  EXPO_STATUS_RENDER_FAILURE = 9,
  /**
   * The output buffer is too small; the needed size has been reported.
   */
  EXPO_STATUS_BUFFER_TOO_SMALL = 10,
  EXPO_STATUS_IO = 11,
  /**
   * A bug inside the library; the call had no effect.
   */
  EXPO_STATUS_PANIC = 12,
} ExpoStatus;

typedef enum ExpoFormat {
  EXPO_FORMAT_PPM = 0,
  EXPO_FORMAT_PNG = 1,
} ExpoFormat;

/**
 * A finished render: the outcome grid, its colored image, and the roots.
 */
typedef struct ExpoRender ExpoRender;

/**
 * A validated scene.
 */
typedef struct ExpoScene ExpoScene;

/**
 * A complex number, layout-compatible with `double[2]`.
 */
typedef struct ExpoComplex {
  double re;
  double im;
} ExpoComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *expo_version(void);

/**
 * Message for the last failed call on this thread, or null if the last
 * call succeeded. Valid until the next call into the library on this thread.
 */
const char *expo_last_error_message(void);

/**
 * Parse and validate a scene from JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ExpoStatus expo_scene_from_json(const char *json, struct ExpoScene **out);

/**
 * Release a scene. Null is ignored.
 *
 * # Safety
 * `scene` must come from [`expo_scene_from_json`] and not be freed twice.
 */
void expo_scene_free(struct ExpoScene *scene);

/**
 * Render a scene with `workers` threads (0 picks a default). The result
 * does not depend on the worker count.
 *
 * # Safety
 * `scene` must be a live scene handle and `out` a valid pointer.
 */
enum ExpoStatus expo_render(const struct ExpoScene *scene,
                            uint32_t workers,
                            struct ExpoRender **out);

/**
 * Release a render. Null is ignored.
 *
 * # Safety
 * `render` must come from [`expo_render`] and not be freed twice.
 */
void expo_render_free(struct ExpoRender *render);

/**
 * Image width in pixels; 0 for a null handle.
 *
 * # Safety
 * `render` must be null or a live render handle.
 */
uint32_t expo_render_width(const struct ExpoRender *render);

/**
 * Image height in pixels; 0 for a null handle.
 *
 * # Safety
 * `render` must be null or a live render handle.
 */
uint32_t expo_render_height(const struct ExpoRender *render);

/**
 * Borrow the row-major RGB pixels (`width * height * 3` bytes). The
 * pointer lives as long as the handle.
 *
 * # Safety
 * `render` must be a live render handle; `len` may be null.
 */
const uint8_t *expo_render_rgb(const struct ExpoRender *render, size_t *len);

/**
 * Number of roots the render classified against.
 *
 * # Safety
 * `render` must be null or a live render handle.
 */
size_t expo_render_root_count(const struct ExpoRender *render);

/**
 * Root `index`, in the order used by pixel root indices.
 *
 * # Safety
 * `render` must be a live render handle and `out` a valid pointer.
 */
enum ExpoStatus expo_render_root(const struct ExpoRender *render,
                                 size_t index,
                                 struct ExpoComplex *out);

/**
 * Copy the outcome grid in its flat binary layout: row-major, five bytes
 * per pixel (status, root index as little-endian u16, iterations as
 * little-endian u16). Call with a null buffer to learn the size.
 *
 * # Safety
 * `render` must be a live render handle, `buf` null or writable for `cap`
 * bytes, and `needed` a valid pointer.
 */
enum ExpoStatus expo_render_outcomes(const struct ExpoRender *render,
                                     uint8_t *buf,
                                     size_t cap,
                                     size_t *needed);

/**
 * Encode the image into a caller buffer. Call with a null buffer to learn
 * the size.
 *
 * # Safety
 * As for [`expo_render_outcomes`].
 */
enum ExpoStatus expo_render_encode(const struct ExpoRender *render,
                                   enum ExpoFormat format,
                                   uint8_t *buf,
                                   size_t cap,
                                   size_t *needed);

/**
 * Encode the image to a file.
 *
 * # Safety
 * `render` must be a live render handle and `path` a NUL-terminated string.
 */
enum ExpoStatus expo_render_write(const struct ExpoRender *render,
                                  enum ExpoFormat format,
                                  const char *path);

/**
 * All roots of the polynomial with ascending coefficients `coeffs[0..len]`,
 * sorted by real then imaginary part. `roots_out` must hold `cap` values;
 * `count` receives the degree even when the buffer is too small.
 *
 * # Safety
 * `coeffs` must be readable for `len` values, `roots_out` null or writable
 * for `cap` values, and `count` a valid pointer.
 */
enum ExpoStatus expo_find_roots(const struct ExpoComplex *coeffs,
                                size_t len,
                                struct ExpoComplex *roots_out,
                                size_t cap,
                                size_t *count);

/**
 * One step `B_{m,alpha}(z)` of the basic family on the given polynomial.
 *
 * # Safety
 * `coeffs` must be readable for `len` values and `out` a valid pointer.
 */
enum ExpoStatus expo_basic_family_step(const struct ExpoComplex *coeffs,
                                       size_t len,
                                       struct ExpoComplex z,
                                       uint32_t m,
                                       struct ExpoComplex alpha,
                                       struct ExpoComplex *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EXPOGRAPH_H */
