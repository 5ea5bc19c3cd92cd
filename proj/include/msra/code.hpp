#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "msra/errors.hpp"
#include "msra/field.hpp"
#include "msra/linalg.hpp"
#include "msra/rational.hpp"

namespace msra {

inline constexpr std::size_t kDefaultMaxAttempts = 32;

/// Code geometry. Everything downstream is shaped by these counts:
///   gamma     = (n-k)(k-1)        number of alignment relations
///   per_node  = (n-k) * delta^gamma   symbols stored per node (M/k)
///   file_size = k * per_node          symbols per encoded chunk (M)
///   beta      = (delta+1)^gamma       projected symbols per systematic helper
///   sub_beta  = delta^gamma           projected symbols per parity helper
struct CodeParams {
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t delta = 0;
    u64 q = 0;

    std::size_t gamma = 0;
    std::size_t per_node = 0;
    std::size_t file_size = 0;
    std::size_t beta = 0;
    std::size_t sub_beta = 0;

    static CodeParams create(std::size_t n, std::size_t k, std::size_t delta, u64 q) {
        if (k < 2) throw ParamError("k must be >= 2 (use replication for k = 1)");
        if (k >= n) throw ParamError("need k < n");
        if (delta < 1) throw ParamError("delta must be >= 1");
        PrimeField field(q);  // validates primality and q >= 3

        CodeParams p;
        p.n = n;
        p.k = k;
        p.delta = delta;
        p.q = q;
        p.gamma = (n - k) * (k - 1);
        auto sub_beta = checked_pow(delta, p.gamma);
        auto beta = checked_pow(delta + 1, p.gamma);
        auto per_node = sub_beta ? checked_mul(n - k, *sub_beta) : std::nullopt;
        auto file_size = per_node ? checked_mul(k, *per_node) : std::nullopt;
        if (!sub_beta || !beta || !per_node || !file_size) {
            throw ParamError("derived sizes overflow for (n=" + std::to_string(n) +
                             ", k=" + std::to_string(k) + ", delta=" + std::to_string(delta) + ")");
        }
        p.sub_beta = *sub_beta;
        p.beta = *beta;
        p.per_node = *per_node;
        p.file_size = *file_size;
        return p;
    }

    std::size_t parity_count() const { return n - k; }
};

/// One encoded chunk: M symbols read as k stacked columns x_1..x_k of
/// length M/k each (x_i = symbols[(i-1)*M/k .. i*M/k)).
using FileVector = std::vector<u64>;

struct NodeShard {
    std::size_t node_id = 0;  // 1..n
    std::vector<u64> data;    // per_node symbols

    bool operator==(const NodeShard& o) const { return node_id == o.node_id && data == o.data; }
};

/// A verified storage code: the diagonal coding matrices A_{j,i} for parity
/// nodes j in {k+1..n} against systematic columns i in {1..k}, plus the seed
/// they were regenerated from. Systematic rows are implicit (identity).
class MsrCode {
public:
    static MsrCode construct(std::size_t n, std::size_t k, std::size_t delta, u64 q, u64 seed,
                             std::size_t max_attempts = kDefaultMaxAttempts);
    static MsrCode fixture_4_2();

    /// Assemble from explicit matrices (fixture and adversarial test codes).
    /// No MDS check is run here.
    static MsrCode with_matrices(CodeParams params, u64 seed, std::vector<DiagonalMatrix> coding,
                                 bool fixture = false) {
        if (coding.size() != params.parity_count() * params.k) {
            throw ParamError("expected one coding matrix per (parity node, systematic column)");
        }
        for (const auto& m : coding) {
            if (m.dim() != params.per_node) throw ParamError("coding matrix dimension mismatch");
        }
        return MsrCode(std::move(params), seed, std::move(coding), 0, fixture);
    }

    const CodeParams& params() const { return params_; }
    u64 seed() const { return seed_; }
    std::size_t attempts_used() const { return attempts_used_; }
    bool is_fixture() const { return fixture_; }
    const PrimeField& field() const { return field_; }

    /// Coding matrix for parity node j in {k+1..n}, systematic column i in {1..k}.
    const DiagonalMatrix& coding(std::size_t j, std::size_t i) const {
        if (j <= params_.k || j > params_.n || i < 1 || i > params_.k) {
            throw std::invalid_argument("coding(j, i): index out of range");
        }
        return coding_[(j - params_.k - 1) * params_.k + (i - 1)];
    }

    /// Diagonal entries in (j, i, m) order, the canonical serialization order.
    std::vector<u64> flattened_entries() const {
        std::vector<u64> out;
        out.reserve(coding_.size() * params_.per_node);
        for (const auto& m : coding_) out.insert(out.end(), m.d.begin(), m.d.end());
        return out;
    }

private:
    MsrCode(CodeParams params, u64 seed, std::vector<DiagonalMatrix> coding,
            std::size_t attempts_used, bool fixture)
        : params_(params),
          seed_(seed),
          attempts_used_(attempts_used),
          fixture_(fixture),
          coding_(std::move(coding)),
          field_(params.q) {}

    CodeParams params_;
    u64 seed_;
    std::size_t attempts_used_;
    bool fixture_;
    std::vector<DiagonalMatrix> coding_;  // [(j - k - 1) * k + (i - 1)]
    PrimeField field_;
};

/// Visit every k-subset of {1..n} in lexicographic order.
inline void for_each_k_subset(std::size_t n, std::size_t k,
                              const std::function<bool(const std::vector<std::size_t>&)>& visit) {
    std::vector<std::size_t> pick(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = i + 1;
    for (;;) {
        if (!visit(pick)) return;
        // advance
        std::size_t i = k;
        while (i > 0 && pick[i - 1] == n - k + i) --i;
        if (i == 0) return;
        ++pick[i - 1];
        for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
}

namespace detail {

inline std::vector<DiagonalMatrix> sample_coding_matrices(const CodeParams& p,
                                                          const PrimeField& field, u64 seed,
                                                          std::size_t attempt) {
    std::vector<DiagonalMatrix> coding;
    coding.reserve(p.parity_count() * p.k);
    for (std::size_t j = p.k + 1; j <= p.n; ++j) {
        for (std::size_t i = 1; i <= p.k; ++i) {
            std::vector<u64> diag(p.per_node);
            for (std::size_t m = 0; m < p.per_node; ++m) {
                SeededRng rng(seed, "A/" + std::to_string(attempt) + "/" + std::to_string(j) +
                                        "/" + std::to_string(i) + "/" + std::to_string(m));
                diag[m] = field.sample_nonzero(rng);
            }
            coding.emplace_back(std::move(diag));
        }
    }
    return coding;
}

/// Subset bookkeeping for the MDS condition: the stacked matrix of a k-subset
/// reduces to, per coordinate, an m x m block over the m parity members and
/// the m absent systematic columns.
struct SubsetBlocks {
    std::vector<std::size_t> parity;       // chosen parity nodes, ascending
    std::vector<std::size_t> missing_sys;  // absent systematic columns, ascending
};

inline SubsetBlocks split_subset(const CodeParams& p, const std::vector<std::size_t>& subset) {
    SubsetBlocks b;
    std::vector<bool> has_sys(p.k + 1, false);
    for (std::size_t id : subset) {
        if (id <= p.k) {
            has_sys[id] = true;
        } else {
            b.parity.push_back(id);
        }
    }
    for (std::size_t i = 1; i <= p.k; ++i) {
        if (!has_sys[i]) b.missing_sys.push_back(i);
    }
    return b;
}

}  // namespace detail

/// Per-coordinate MDS verification: for each k-subset and each coordinate,
/// the m x m block of diagonal entries over (chosen parity rows, absent
/// systematic columns) must be nonsingular. Cost O(C(n,k) * M/k * m^3)
/// instead of the dense O(C(n,k) * M^3).
inline bool mds_check_fast(const MsrCode& code) {
    const CodeParams& p = code.params();
    const PrimeField& f = code.field();
    bool ok = true;
    for_each_k_subset(p.n, p.k, [&](const std::vector<std::size_t>& subset) {
        auto blocks = detail::split_subset(p, subset);
        const std::size_t m = blocks.parity.size();
        if (m == 0) return true;  // all-systematic subset, trivially full rank
        FieldMatrix block(m, m);
        for (std::size_t coord = 0; coord < p.per_node; ++coord) {
            for (std::size_t r = 0; r < m; ++r) {
                for (std::size_t c = 0; c < m; ++c) {
                    block.at(r, c) = code.coding(blocks.parity[r], blocks.missing_sys[c]).d[coord];
                }
            }
            if (det_small(f, block) == 0) {
                ok = false;
                return false;
            }
        }
        return true;
    });
    return ok;
}

/// Reference MDS verification: materialize the full M x M stacked matrix per
/// subset and check its rank. Test oracle for mds_check_fast; far too slow
/// beyond desk scale.
inline bool mds_check_naive(const MsrCode& code) {
    const CodeParams& p = code.params();
    const PrimeField& f = code.field();
    bool ok = true;
    for_each_k_subset(p.n, p.k, [&](const std::vector<std::size_t>& subset) {
        FieldMatrix stacked(p.file_size, p.file_size);
        for (std::size_t row_block = 0; row_block < p.k; ++row_block) {
            std::size_t id = subset[row_block];
            for (std::size_t col_block = 0; col_block < p.k; ++col_block) {
                for (std::size_t m = 0; m < p.per_node; ++m) {
                    u64 v;
                    if (id <= p.k) {
                        v = (id == col_block + 1) ? 1 : 0;
                    } else {
                        v = code.coding(id, col_block + 1).d[m];
                    }
                    stacked.at(row_block * p.per_node + m, col_block * p.per_node + m) = v;
                }
            }
        }
        if (rank(f, stacked) != p.file_size) {
            ok = false;
            return false;
        }
        return true;
    });
    return ok;
}

inline MsrCode MsrCode::construct(std::size_t n, std::size_t k, std::size_t delta, u64 q, u64 seed,
                                  std::size_t max_attempts) {
    CodeParams p = CodeParams::create(n, k, delta, q);
    PrimeField field(q);
    for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
        auto coding = detail::sample_coding_matrices(p, field, seed, attempt);
        MsrCode candidate(p, seed, std::move(coding), attempt, false);
        if (mds_check_fast(candidate)) return candidate;
    }
    throw ConstructionFailed("MDS verification failed " + std::to_string(max_attempts) +
                                 " times; q likely too small for (n, k, delta)",
                             max_attempts);
}

/// The hard-coded (4,2) code over GF(5): A_{3,1} = diag(1,2), A_{4,1} = diag(2,1),
/// A_{3,2} = A_{4,2} = I. Used as a golden end-to-end instance; node 1 has a
/// dedicated 3-symbol repair path (see repair.hpp).
inline MsrCode MsrCode::fixture_4_2() {
    CodeParams p = CodeParams::create(4, 2, 1, 5);
    std::vector<DiagonalMatrix> coding{
        DiagonalMatrix({1, 2}),  // A_{3,1}
        DiagonalMatrix({1, 1}),  // A_{3,2}
        DiagonalMatrix({2, 1}),  // A_{4,1}
        DiagonalMatrix({1, 1}),  // A_{4,2}
    };
    return MsrCode(p, 0, std::move(coding), 0, true);
}

/// Shard j <= k stores x_j verbatim; shard j > k stores sum_i A_{j,i} x_i.
inline std::vector<NodeShard> encode(const MsrCode& code, const FileVector& file) {
    const CodeParams& p = code.params();
    const PrimeField& f = code.field();
    if (file.size() != p.file_size) {
        throw std::invalid_argument("encode: file must hold exactly " +
                                    std::to_string(p.file_size) + " symbols");
    }
    std::vector<NodeShard> shards(p.n);
    for (std::size_t i = 1; i <= p.k; ++i) {
        shards[i - 1].node_id = i;
        shards[i - 1].data.assign(file.begin() + (i - 1) * p.per_node,
                                  file.begin() + i * p.per_node);
    }
    for (std::size_t j = p.k + 1; j <= p.n; ++j) {
        NodeShard& s = shards[j - 1];
        s.node_id = j;
        s.data.assign(p.per_node, 0);
        for (std::size_t i = 1; i <= p.k; ++i) {
            const DiagonalMatrix& a = code.coding(j, i);
            for (std::size_t m = 0; m < p.per_node; ++m) {
                s.data[m] = f.add(s.data[m], f.mul(a.d[m], file[(i - 1) * p.per_node + m]));
            }
        }
    }
    return shards;
}

/// Rebuild the file from any k shards with distinct ids. Known systematic
/// shards are substituted first; the residual system splits into independent
/// m x m solves per coordinate thanks to the diagonal structure.
inline FileVector reconstruct(const MsrCode& code, const std::vector<NodeShard>& shards) {
    const CodeParams& p = code.params();
    const PrimeField& f = code.field();
    if (shards.size() != p.k) {
        throw std::invalid_argument("reconstruct: need exactly k = " + std::to_string(p.k) +
                                    " shards");
    }
    std::vector<const NodeShard*> by_id(p.n + 1, nullptr);
    for (const NodeShard& s : shards) {
        if (s.node_id < 1 || s.node_id > p.n) {
            throw std::invalid_argument("reconstruct: shard id out of range");
        }
        if (by_id[s.node_id]) throw std::invalid_argument("reconstruct: duplicate shard id");
        if (s.data.size() != p.per_node) {
            throw std::invalid_argument("reconstruct: shard has wrong symbol count");
        }
        by_id[s.node_id] = &s;
    }

    FileVector file(p.file_size, 0);
    std::vector<std::size_t> missing_sys;
    std::vector<std::size_t> parity_used;
    for (std::size_t i = 1; i <= p.k; ++i) {
        if (by_id[i]) {
            std::copy(by_id[i]->data.begin(), by_id[i]->data.end(),
                      file.begin() + (i - 1) * p.per_node);
        } else {
            missing_sys.push_back(i);
        }
    }
    for (std::size_t j = p.k + 1; j <= p.n; ++j) {
        if (by_id[j]) parity_used.push_back(j);
    }
    const std::size_t m = missing_sys.size();
    if (m == 0) return file;
    // |subset| = k means exactly m parity shards accompany the k-m systematic ones.

    // Residual per parity shard: D_j minus the contributions of known columns.
    std::vector<std::vector<u64>> residual(m);
    for (std::size_t r = 0; r < m; ++r) {
        const NodeShard& s = *by_id[parity_used[r]];
        residual[r] = s.data;
        for (std::size_t i = 1; i <= p.k; ++i) {
            if (!by_id[i]) continue;
            const DiagonalMatrix& a = code.coding(parity_used[r], i);
            for (std::size_t coord = 0; coord < p.per_node; ++coord) {
                residual[r][coord] =
                    f.sub(residual[r][coord], f.mul(a.d[coord], by_id[i]->data[coord]));
            }
        }
    }

    FieldMatrix block(m, m);
    std::vector<u64> rhs(m);
    for (std::size_t coord = 0; coord < p.per_node; ++coord) {
        for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t c = 0; c < m; ++c) {
                block.at(r, c) = code.coding(parity_used[r], missing_sys[c]).d[coord];
            }
            rhs[r] = residual[r][coord];
        }
        std::vector<u64> x;
        try {
            x = solve(f, block, rhs);
        } catch (const SingularMatrix&) {
            throw CorruptCodeError(
                "reconstruct: singular system; shards do not match this code");
        }
        for (std::size_t c = 0; c < m; ++c) {
            file[(missing_sys[c] - 1) * p.per_node + coord] = x[c];
        }
    }
    return file;
}

}  // namespace msra
