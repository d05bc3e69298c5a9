#ifndef LAM_LAM_H
#define LAM_LAM_H

/*
 * C interface to the coherence layer. Every fallible call returns a
 * lam_status; on failure the message is available from lam_last_error() on
 * the calling thread until that thread's next failing call. Strings returned
 * through char** out-parameters are owned by the caller and released with
 * lam_free_string(). Handles are released with their *_free function, which
 * accepts NULL.
 */

#include <stddef.h>

#if defined(_WIN32)
#  ifdef LAM_BUILDING_LIBRARY
#    define LAM_API __declspec(dllexport)
#  else
#    define LAM_API __declspec(dllimport)
#  endif
#else
#  define LAM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lam_status {
  LAM_OK = 0,
  LAM_ERR_INVALID_ARGUMENT = 1,
  LAM_ERR_PARSE = 2,
  LAM_ERR_CAP_EXCEEDED = 3,
  LAM_ERR_BOUND_EXCEEDED = 4,
  LAM_ERR_INCOHERENT_BASE = 5,
  LAM_ERR_DIVISION_BY_CERTAINTY = 6,
  LAM_ERR_PRECONDITION = 7,
  LAM_ERR_MISSING_ASSIGNMENT = 8,
  LAM_ERR_DATA = 9,
  LAM_ERR_PROVIDER = 10,
  LAM_ERR_IO = 11,
  LAM_ERR_INTERNAL = 12
} lam_status;

LAM_API const char* lam_version(void);
LAM_API const char* lam_status_name(lam_status status);
LAM_API const char* lam_last_error(void);
/* Code-point span of the last parse failure; both 0 after other failures. */
LAM_API void lam_last_error_span(size_t* start, size_t* end);
LAM_API void lam_free_string(char* s);

/* ---- formulas and base measures ---------------------------------------- */

typedef struct lam_formula lam_formula;
typedef struct lam_base lam_base;

LAM_API lam_status lam_formula_parse(const char* text, lam_formula** out);
LAM_API void lam_formula_free(lam_formula* f);
LAM_API lam_status lam_formula_serialize(const lam_formula* f, char** out);

LAM_API lam_status lam_base_new(lam_base** out);
LAM_API void lam_base_free(lam_base* base);
/* base(atom | context[0..n)) = p. */
LAM_API lam_status lam_base_set(lam_base* base, const char* atom, double p,
                                const char* const* context, size_t n);
/* Textual form "A=0.8" or "B|A,C=0.5". */
LAM_API lam_status lam_base_assign(lam_base* base, const char* assignment);

LAM_API lam_status lam_eval(const lam_formula* f, const lam_formula* const* context, size_t n,
                            const lam_base* base, double* out);
LAM_API lam_status lam_cond_on_negated(double p_a3, double p_k_given_a3, double p_k, double* out);

/* ---- structures --------------------------------------------------------- */

typedef struct lam_structure lam_structure;

LAM_API lam_status lam_structure_parse(const char* text, lam_structure** out);
LAM_API void lam_structure_free(lam_structure* s);
LAM_API lam_status lam_structure_serialize(const lam_structure* s, char** out);
LAM_API lam_status lam_structure_merge(const lam_structure* a, const lam_structure* b,
                                       lam_structure** out);
/* *found is 1 when an embedding exists; *mapping (may be NULL) receives it as
 * "x->a,y->b" in source-id order. max_maps 0 selects the default cap. */
LAM_API lam_status lam_find_embedding(const lam_structure* source, const lam_structure* target,
                                      unsigned long long max_maps, int* found, char** mapping);
LAM_API lam_status lam_check_satisfaction(const lam_structure* phi, const lam_structure* verifier,
                                          unsigned long long max_maps, int* out);

/* ---- NLI label propagation --------------------------------------------- */

typedef enum lam_nli_label {
  LAM_NLI_UNSET = -1,
  LAM_NLI_ENTAILMENT = 0,
  LAM_NLI_NOT_ENTAILMENT = 1,
  LAM_NLI_CONTRADICTION = 2,
  LAM_NLI_NEUTRAL = 3
} lam_nli_label;

typedef enum lam_nli_config {
  LAM_CFG_C_NOT_H = 0,
  LAM_CFG_NOT_C_H = 1,
  LAM_CFG_NOT_C_NOT_H = 2
} lam_nli_config;

typedef struct lam_pair_labels {
  int label_space; /* 2 or 3 */
  int c_h, p_h, h_c, h_cprime; /* lam_nli_label */
} lam_pair_labels;

typedef struct lam_config_prediction {
  int config;     /* lam_nli_config */
  int label;      /* lam_nli_label */
  int determined; /* 1 when the firing rule is sound */
} lam_config_prediction;

LAM_API lam_status lam_nli_rte_unscoped(const lam_pair_labels* labels, lam_config_prediction out[3]);
LAM_API lam_status lam_nli_rte_scoped(const lam_pair_labels* labels, lam_config_prediction out[2]);
LAM_API lam_status lam_nli_snli_scoped(const lam_pair_labels* labels, lam_config_prediction out[3]);
LAM_API lam_status lam_nli_snli_basic(const lam_pair_labels* labels, int from_hcprime,
                                      lam_config_prediction out[3]);

/* ---- task adapters and audits ------------------------------------------ */

/* polarity: 0 positive, 1 negated. *answer: 1 yes, 0 no. */
LAM_API lam_status lam_qa_answer(int polarity, double base_yes, int* answer, double* prob);
/* flipped receives k raw scores 1 - p_i; *selection is caller-owned. */
LAM_API lam_status lam_mkr_rerank(const char* const* labels, const double* probs, size_t n,
                                  size_t k, double* flipped, char** selection);
LAM_API lam_status lam_dutch_book_margin(const double* probs, size_t n, double* out);
/* curve receives n products; *index is the 1-based hallucination step, 0 if none. */
LAM_API lam_status lam_chain_decay(const double* steps, size_t n, double distractor, double* curve,
                                   size_t* index);
LAM_API lam_status lam_audit_file(const char* path, double epsilon, char** report_json);

/* ---- data and runs ------------------------------------------------------ */

LAM_API lam_status lam_generate_syn(char** jsonl);
/* config_json keys: task, mode, data, provider, labels, k, epsilon, out,
 * parallel, stamp, retries, backoff_ms, max_in_flight. Unknown keys are
 * rejected. Returns the report document. */
LAM_API lam_status lam_run_eval(const char* config_json, char** report_json);

#ifdef __cplusplus
}
#endif

#endif
