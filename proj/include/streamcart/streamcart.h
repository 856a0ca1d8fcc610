#ifndef STREAMCART_STREAMCART_H
#define STREAMCART_STREAMCART_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SC_API __declspec(dllexport)
#else
#define SC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every call returns a status. On failure, sc_last_error() describes it
   until the next failing call on the same thread. Strings returned through
   char** out-parameters are heap-allocated; release them with
   sc_string_free(). Rich results are JSON documents. */

typedef enum sc_status {
  SC_OK = 0,
  SC_ERR_INVALID_ARGUMENT = 1,
  SC_ERR_VALIDATION = 2,
  SC_ERR_NOT_FOUND = 3,
  SC_ERR_IO = 4,
  SC_ERR_PARSE = 5,
  SC_ERR_TRANSPORT = 6,
  SC_ERR_EXTRACTION = 7,
  SC_ERR_INTEGRATION = 8,
  SC_ERR_LAYOUT = 9,
  SC_ERR_NO_MESSAGE = 10,
  SC_ERR_MIGRATION = 11,
  SC_ERR_PRECONDITION = 12,
  SC_ERR_JUDGE = 13,
  SC_ERR_INTERNAL = 14
} sc_status;

SC_API const char* sc_version(void);
SC_API const char* sc_status_name(sc_status status);
SC_API const char* sc_last_error(void);
SC_API void sc_string_free(char* s);
/* "trace", "debug", "info", "warn", "error", "off". */
SC_API sc_status sc_set_log_level(const char* level);

/* ---- segmentation ---------------------------------------------------- */

typedef struct sc_ses_config {
  double gamma;
  double alpha;
  int window_size;
  int min_segment_len;
  int warmup_frames; /* <= 0 means window_size */
} sc_ses_config;

typedef struct sc_frame {
  int64_t frame_id;
  double timestamp;
  double vit_similarity;
  double flow_magnitude;
} sc_frame;

typedef struct sc_segment {
  int64_t start_frame;
  int64_t end_frame;
  int64_t confirmed_at_frame;
  double start_time;
  double end_time;
} sc_segment;

typedef struct sc_ses_stream sc_ses_stream;

SC_API void sc_ses_config_default(sc_ses_config* config);
SC_API sc_status sc_ses_fuse_similarity(double c_vit, double m, double gamma, double* out);
SC_API sc_status sc_ses_stream_create(const sc_ses_config* config, sc_ses_stream** out);
SC_API void sc_ses_stream_destroy(sc_ses_stream* stream);
/* *has_segment is set to 1 when the frame confirmed a boundary. */
SC_API sc_status sc_ses_stream_push(sc_ses_stream* stream, const sc_frame* frame, sc_segment* segment,
                                    int* has_segment);
/* JSON array of the segments closed by the flush. */
SC_API sc_status sc_ses_stream_flush(sc_ses_stream* stream, char** segments_json);
SC_API sc_status sc_ses_segment(const sc_frame* frames, size_t count, const sc_ses_config* config,
                                char** result_json);
/* Reads a feature stream file; with include_depths the result also carries
   every frame's depth sample. */
SC_API sc_status sc_ses_segment_file(const char* path, const sc_ses_config* config, int include_depths,
                                     char** result_json);

/* ---- caption prefix truncation -------------------------------------- */

typedef struct sc_kea_config {
  int delta;
  double alpha;
  double beta;
} sc_kea_config;

SC_API void sc_kea_config_default(sc_kea_config* config);
/* *index is the 1-based truncation position, 0 when nothing qualifies. */
SC_API sc_status sc_kea_find_truncation(const double* log_probs, size_t count, const sc_kea_config* config,
                                        int64_t* index, size_t* prefix_len);
SC_API sc_status sc_kea_truncate_file(const char* path, const sc_kea_config* config, char** result_json);

/* ---- click Q&A ------------------------------------------------------- */

/* judge: "exact" or "lenient". */
SC_API sc_status sc_reward(const char* q_hat, const char* a_hat, const char* q_star, const char* a_star,
                           const char* judge, double* reward);
SC_API sc_status sc_clickqa_resolve(const char* overlay_json, int64_t frame_id, int x, int y, double radius,
                                    char** message_json);
/* options_json (may be NULL): {"backend": <profile>, "judge": "exact",
   "record": <record>, "prime_mock": true}. */
SC_API sc_status sc_clickqa_evaluate(const char* manifest_path, const char* options_json, char** metrics_json);

/* ---- dataset synthesis ----------------------------------------------- */

/* config_json: {"images","per_image","seed","frame_width","frame_height",
   "font_box_height","padding","pool_format":"jsonl"|"clevr"}. */
SC_API sc_status sc_datasynth_generate(const char* pool_path, const char* out_dir, const char* config_json,
                                       char** summary_json);

/* ---- offline copy pipeline ------------------------------------------- */

typedef struct sc_lexicon sc_lexicon;
typedef struct sc_record_store sc_record_store;

SC_API sc_status sc_lexicon_load(const char* path, sc_lexicon** out);
SC_API void sc_lexicon_destroy(sc_lexicon* lexicon);
SC_API sc_status sc_detect_prohibited(const sc_lexicon* lexicon, const char* text, char** matches_json);
/* {"text": ..., "report": {...}}; backend_json may be NULL (no rewrite). */
SC_API sc_status sc_purify(const sc_lexicon* lexicon, const char* text, const char* backend_json,
                           char** result_json);
/* request_json: {"product_id", "materials": [{"source_kind","content","origin"}],
   "external_snippets": [...]}. backend_json NULL means the mock. */
SC_API sc_status sc_offline_integrate(const char* request_json, const char* backend_json, char** record_json);
/* Exactly one of style / exemplar must be non-NULL. */
SC_API sc_status sc_offline_copy(const char* record_json, const char* style, const char* exemplar,
                                 const char* backend_json, char** copy_json);

SC_API sc_status sc_record_store_open(const char* dir, sc_record_store** out);
SC_API void sc_record_store_close(sc_record_store* store);
SC_API sc_status sc_record_save(sc_record_store* store, const char* record_json);
SC_API sc_status sc_record_load(sc_record_store* store, const char* product_id, char** record_json);

/* ---- service ---------------------------------------------------------- */

typedef struct sc_service sc_service;

/* config_path and overrides_json may be NULL; the environment is layered
   between them. */
SC_API sc_status sc_service_create(const char* config_path, const char* overrides_json, sc_service** out);
SC_API sc_status sc_service_start(sc_service* service, int* port);
/* Serves on the calling thread until sc_service_stop(). */
SC_API sc_status sc_service_run(sc_service* service);
SC_API void sc_service_stop(sc_service* service);
SC_API void sc_service_destroy(sc_service* service);

/* seed < 0 keeps the scenario's seed. */
SC_API sc_status sc_simulate(const char* scenario_path, int64_t seed, char** transcript, char** metrics_json);

#ifdef __cplusplus
}
#endif

#endif
