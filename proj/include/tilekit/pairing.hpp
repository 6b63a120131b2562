#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "tilekit/common.hpp"
#include "tilekit/embedding.hpp"

namespace tilekit {

// Reference/candidate embeddings plus an explicit candidate-row -> reference-row
// map, as required by the sample-wise cosine-similarity protocol.
struct PairedSets {
    EmbeddingSet reference;
    EmbeddingSet candidate;
    std::vector<int64_t> pairing;  // pairing[i] = reference row matched to candidate row i

    void validate() const {
        reference.validate();
        candidate.validate();
        if (reference.dim != candidate.dim) throw_data("PairedSets: dimension mismatch");
        if (pairing.size() != static_cast<size_t>(candidate.rows))
            throw_data("PairedSets: pairing must cover every candidate row");
        for (int64_t r : pairing)
            if (r < 0 || r >= reference.rows) throw_data("PairedSets: pairing index out of range");
    }
};

// Matches candidate rows to reference rows by shared ids. Candidate ids must
// be a subset of reference ids; duplicates on either side are rejected.
inline PairedSets pair_by_id(EmbeddingSet reference, const std::vector<std::string>& reference_ids,
                             EmbeddingSet candidate, const std::vector<std::string>& candidate_ids) {
    if (reference_ids.size() != static_cast<size_t>(reference.rows))
        throw_data("pair_by_id: reference id list length does not match rows");
    if (candidate_ids.size() != static_cast<size_t>(candidate.rows))
        throw_data("pair_by_id: candidate id list length does not match rows");
    if (reference.dim != candidate.dim) throw_data("pair_by_id: dimension mismatch");

    std::unordered_map<std::string, int64_t> index;
    index.reserve(reference_ids.size());
    for (size_t i = 0; i < reference_ids.size(); ++i) {
        if (!index.emplace(reference_ids[i], static_cast<int64_t>(i)).second)
            throw_data("pair_by_id: duplicate reference id '" + reference_ids[i] + "'");
    }
    std::unordered_map<std::string, int64_t> seen;
    seen.reserve(candidate_ids.size());

    PairedSets out;
    out.pairing.resize(candidate_ids.size());
    for (size_t i = 0; i < candidate_ids.size(); ++i) {
        if (!seen.emplace(candidate_ids[i], static_cast<int64_t>(i)).second)
            throw_data("pair_by_id: duplicate candidate id '" + candidate_ids[i] + "'");
        auto it = index.find(candidate_ids[i]);
        if (it == index.end()) throw_data("pair_by_id: candidate id '" + candidate_ids[i] + "' not in reference");
        out.pairing[i] = it->second;
    }
    out.reference = std::move(reference);
    out.candidate = std::move(candidate);
    out.validate();
    return out;
}

}  // namespace tilekit
