#pragma once

// Retrieval-grounded drift signal: a bag-of-words tf-idf corpus, the
// cosine confidence of a query against it, and the threshold/perturbation
// rule that turns low confidence into fault triggers.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cogrel/error.hpp"
#include "cogrel/rng.hpp"
#include "cogrel/telemetry.hpp"

namespace cogrel {

// Sparse tf-idf vector: (vocabulary index, weight) sorted by index.
struct TermVector {
    std::vector<std::pair<std::int32_t, double>> entries;
    double norm = 0.0;

    bool zero() const { return entries.empty() || norm == 0.0; }
};

struct Corpus {
    std::vector<std::string> documents;               // doc_id = position
    std::unordered_map<std::string, std::int32_t> vocabulary;
    std::vector<double> idf;                          // by vocabulary index
    std::vector<TermVector> doc_vectors;
};

// Lowercase alphanumeric runs; everything else separates tokens.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur += static_cast<char>(std::tolower(c));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

namespace detail {

inline TermVector make_term_vector(const std::vector<std::string>& tokens, const Corpus& corpus) {
    std::map<std::int32_t, double> tf;
    for (const auto& tok : tokens) {
        auto it = corpus.vocabulary.find(tok);
        if (it != corpus.vocabulary.end()) tf[it->second] += 1.0;
    }
    TermVector v;
    double sq = 0.0;
    v.entries.reserve(tf.size());
    for (const auto& [idx, count] : tf) {
        const double w = count * corpus.idf[static_cast<std::size_t>(idx)];
        v.entries.emplace_back(idx, w);
        sq += w * w;
    }
    v.norm = std::sqrt(sq);
    return v;
}

}  // namespace detail

// Builds the corpus from one document per entry. Smoothed idf:
// idf(t) = ln((1 + N) / (1 + df(t))) + 1, always positive.
inline Corpus build_corpus(const std::vector<std::string>& docs) {
    if (docs.empty()) throw ConfigError("corpus must contain at least one document");
    Corpus corpus;
    corpus.documents = docs;

    std::vector<std::vector<std::string>> doc_tokens;
    doc_tokens.reserve(docs.size());
    std::map<std::string, std::int32_t> df;  // ordered: vocabulary index is stable
    for (std::size_t d = 0; d < docs.size(); ++d) {
        auto tokens = tokenize(docs[d]);
        if (tokens.empty())
            throw ConfigError("document " + std::to_string(d) + " has no tokens");
        std::vector<std::string> uniq = tokens;
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        for (const auto& tok : uniq) df[tok] += 1;
        doc_tokens.push_back(std::move(tokens));
    }

    corpus.idf.reserve(df.size());
    for (const auto& [tok, count] : df) {
        corpus.vocabulary.emplace(tok, static_cast<std::int32_t>(corpus.idf.size()));
        corpus.idf.push_back(
            std::log((1.0 + static_cast<double>(docs.size())) / (1.0 + count)) + 1.0);
    }

    corpus.doc_vectors.reserve(docs.size());
    for (const auto& tokens : doc_tokens) {
        auto v = detail::make_term_vector(tokens, corpus);
        if (v.zero())
            throw ConfigError("document vector has no non-zero entries");
        corpus.doc_vectors.push_back(std::move(v));
    }
    return corpus;
}

// One document per non-blank line.
inline Corpus load_corpus_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file: " + path);
    std::vector<std::string> docs;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        docs.push_back(line);
    }
    return build_corpus(docs);
}

// Maps query text onto the corpus vocabulary; out-of-vocabulary tokens
// are dropped. A query sharing no terms yields the zero vector (not an
// error; it reads as total retrieval failure downstream).
inline TermVector vectorize(std::string_view text, const Corpus& corpus) {
    return detail::make_term_vector(tokenize(text), corpus);
}

constexpr std::int32_t kNoDocument = -1;

struct ConfidenceResult {
    double value = 0.0;
    std::int32_t top_doc = kNoDocument;
};

inline double dot(const TermVector& a, const TermVector& b) {
    double acc = 0.0;
    auto ia = a.entries.begin();
    auto ib = b.entries.begin();
    while (ia != a.entries.end() && ib != b.entries.end()) {
        if (ia->first < ib->first) {
            ++ia;
        } else if (ib->first < ia->first) {
            ++ib;
        } else {
            acc += ia->second * ib->second;
            ++ia;
            ++ib;
        }
    }
    return acc;
}

// Retrieval confidence: max cosine between the query and any document.
// Ties break toward the lowest doc_id; a zero query vector scores 0.0
// with the sentinel top_doc.
inline ConfidenceResult confidence(const TermVector& query, const Corpus& corpus) {
    if (query.zero()) return {0.0, kNoDocument};
    ConfidenceResult best{-1.0, kNoDocument};
    for (std::size_t d = 0; d < corpus.doc_vectors.size(); ++d) {
        const auto& doc = corpus.doc_vectors[d];
        const double c = dot(query, doc) / (query.norm * doc.norm);
        if (c > best.value) {
            best.value = c;
            best.top_doc = static_cast<std::int32_t>(d);
        }
    }
    // Defensive clamp: weights are non-negative, and a self-match may
    // land an ulp above 1, which downstream range checks would reject.
    best.value = std::clamp(best.value, 0.0, 1.0);
    return best;
}

// ---------------------------------------------------------------------------
// drift decision

struct DriftConfig {
    double tau_drift = 0.6;                  // drift iff confidence < tau (strict)
    double perturbation_prob = 1.0;          // chance a healthy cycle is perturbed
    double perturbation_scale = 0.25;        // confidence degradation on low-confidence faults
    double perturbation_tool_weight = 0.62;  // P(tool-error | perturbed)

    void validate() const {
        if (!(tau_drift > 0.0) || tau_drift > 1.0)
            throw ConfigError("tau_drift must lie in (0, 1]");
        if (!(perturbation_prob >= 0.0) || perturbation_prob > 1.0)
            throw ConfigError("perturbation_prob must lie in [0, 1]");
        if (!(perturbation_scale >= 0.0))
            throw ConfigError("perturbation_scale must be >= 0");
        if (!(perturbation_tool_weight >= 0.0) || perturbation_tool_weight > 1.0)
            throw ConfigError("perturbation_tool_weight must lie in [0, 1]");
    }
};

// Threshold rule: confidence below tau_drift is drift, full stop.
// Otherwise the cycle may be perturbed into a tool-error or
// low-confidence fault. With perturbation_prob == 0 this is a pure
// threshold function and consumes no randomness.
inline std::optional<TriggerKind> check_drift(double confidence_value, const DriftConfig& cfg,
                                              RandomSource& rng) {
    cfg.validate();
    if (!std::isfinite(confidence_value) || confidence_value < 0.0 || confidence_value > 1.0)
        throw DomainError("confidence must lie in [0, 1]");
    if (confidence_value < cfg.tau_drift) return TriggerKind::drift_observed;
    if (cfg.perturbation_prob > 0.0 && rng.bernoulli(cfg.perturbation_prob)) {
        return rng.bernoulli(cfg.perturbation_tool_weight) ? TriggerKind::tool_error
                                                           : TriggerKind::low_confidence;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// query pool

struct QueryPool {
    std::vector<std::string> queries;

    void validate() const {
        if (queries.empty()) throw ConfigError("query pool must be non-empty");
    }
};

inline QueryPool load_query_pool_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open query file: " + path);
    QueryPool pool;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        pool.queries.push_back(line);
    }
    pool.validate();
    return pool;
}

}  // namespace cogrel
