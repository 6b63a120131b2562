#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "tilekit/common.hpp"
#include "tilekit/pairing.hpp"

namespace tilekit {

struct PairedCosine {
    double mean = 0.0;
    double std = 0.0;  // population std over pairs
    std::vector<double> per_pair;
};

// Sample-wise cosine similarity between each candidate row and its paired
// reference row.
inline PairedCosine paired_cosine(const PairedSets& p) {
    p.validate();
    const int64_t d = p.candidate.dim;
    PairedCosine out;
    out.per_pair.resize(static_cast<size_t>(p.candidate.rows));

    double sum = 0.0;
    for (int64_t i = 0; i < p.candidate.rows; ++i) {
        const float* c = p.candidate.data.data() + static_cast<size_t>(i) * static_cast<size_t>(d);
        const float* r = p.reference.data.data() + static_cast<size_t>(p.pairing[static_cast<size_t>(i)]) * static_cast<size_t>(d);
        double dot = 0.0, nc = 0.0, nr = 0.0;
        for (int64_t j = 0; j < d; ++j) {
            dot += static_cast<double>(c[j]) * static_cast<double>(r[j]);
            nc += static_cast<double>(c[j]) * static_cast<double>(c[j]);
            nr += static_cast<double>(r[j]) * static_cast<double>(r[j]);
        }
        if (nc == 0.0) throw_numeric("paired_cosine: zero-norm candidate row " + std::to_string(i));
        if (nr == 0.0)
            throw_numeric("paired_cosine: zero-norm reference row " +
                          std::to_string(p.pairing[static_cast<size_t>(i)]));
        double cosv = dot / std::sqrt(nc * nr);
        out.per_pair[static_cast<size_t>(i)] = cosv;
        sum += cosv;
    }
    const double n = static_cast<double>(p.candidate.rows);
    out.mean = sum / n;
    double var = 0.0;  // two-pass, stable when all pairs coincide
    for (double v : out.per_pair) var += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(var / n);
    return out;
}

}  // namespace tilekit
