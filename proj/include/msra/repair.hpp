#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "msra/code.hpp"
#include "msra/errors.hpp"
#include "msra/field.hpp"
#include "msra/linalg.hpp"
#include "msra/rational.hpp"

namespace msra {

/// Repair traffic accounting. nominal_B is what the scheme is charged in the
/// limit analysis ((n-1) projections of beta symbols); effective_B is what a
/// helper actually has to send once the provably-zero columns are dropped.
struct BandwidthReport {
    std::size_t nominal_B = 0;    // (n-1) * (delta+1)^gamma
    std::size_t effective_B = 0;  // (k-1) * (delta+1)^gamma + (n-k) * delta^gamma
    std::size_t file_size = 0;    // M
    Rational nominal_ratio;       // nominal_B / M
    Rational cutset_ratio;        // (n-1) / (k(n-k))
};

inline BandwidthReport bandwidth_report(const CodeParams& p) {
    BandwidthReport r;
    auto nominal = checked_mul(p.n - 1, p.beta);
    auto sys_part = checked_mul(p.k - 1, p.beta);
    auto par_part = checked_mul(p.n - p.k, p.sub_beta);
    if (!nominal || !sys_part || !par_part ||
        *sys_part > ~std::size_t{0} - *par_part) {
        throw std::overflow_error("bandwidth counts overflow u64");
    }
    r.nominal_B = *nominal;
    r.effective_B = *sys_part + *par_part;
    r.file_size = p.file_size;
    r.nominal_ratio = Rational(r.nominal_B, p.file_size);
    r.cutset_ratio = Rational(p.n - 1, p.k * (p.n - p.k));
    return r;
}

/// ((delta+1)/delta)^gamma, the exact factor by which the nominal ratio
/// exceeds the cut-set bound.
inline Rational excess_factor(const CodeParams& p) { return Rational(p.beta, p.sub_beta); }

/// Projection vectors for one repair scenario. Columns of V (and Vp) are the
/// products prod_{(j,i)} A_{j,i}^{alpha_{j,i}} w over the interference pairs,
/// with exponents below delta (resp. delta+1). Pairs are ordered ascending j
/// then ascending i, and exponent vectors map to column indices in mixed
/// radix with the first pair as the most significant digit.
struct RepairVectors {
    std::size_t failed = 0;
    std::vector<u64> w;  // per_node nonzero entries
    FieldMatrix V;       // per_node x sub_beta
    FieldMatrix Vp;      // per_node x beta

    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (j, i) interference pairs
    // align[p][c]: Vp column holding A_{pairs[p]} * (column c of V)
    std::vector<std::vector<std::size_t>> align;

    std::vector<std::size_t> parity_nodes;  // helpers projected through V
    std::vector<std::size_t> sys_nodes;     // helpers projected through Vp

    // Stacked reconstruction system: rows (V^T A_{j,failed}) per parity slot,
    // verified nonsingular at build time.
    FieldMatrix solve_stack;
    std::size_t attempts_used = 0;
};

/// One repair session's downloads: per systematic-role helper the beta-long
/// projection Vp^T x_i, per parity-role helper the sub_beta-long V^T D_j.
struct DownloadBundle {
    std::size_t failed = 0;
    std::vector<std::pair<std::size_t, std::vector<u64>>> systematic;
    std::vector<std::pair<std::size_t, std::vector<u64>>> parity;

    std::size_t symbol_count() const {
        std::size_t total = 0;
        for (const auto& [id, v] : systematic) total += v.size();
        for (const auto& [id, v] : parity) total += v.size();
        return total;
    }
};

namespace detail {

/// Coefficient family for one repair scenario: per parity-role node, the
/// diagonal multiplying the unknown plus the diagonals multiplying each
/// interference column. Systematic repair uses the code's own matrices;
/// parity repair uses the change-of-basis family.
struct RepairProblem {
    std::vector<std::size_t> parity_nodes;              // ascending
    std::vector<std::size_t> sys_nodes;                 // ascending
    std::vector<DiagonalMatrix> desired;                // [slot]
    std::vector<std::vector<DiagonalMatrix>> interference;  // [slot][t]
};

inline std::size_t encode_mixed_radix(const std::vector<std::size_t>& digits, std::size_t radix) {
    std::size_t idx = 0;
    for (std::size_t d : digits) idx = idx * radix + d;
    return idx;
}

inline RepairVectors build_vectors(const PrimeField& f, const CodeParams& p,
                                   const RepairProblem& prob, u64 seed, std::size_t failed,
                                   std::size_t max_attempts) {
    const std::size_t gamma = prob.parity_nodes.size() * prob.sys_nodes.size();
    if (gamma != p.gamma) throw std::logic_error("repair frame pair count mismatch");

    RepairVectors rv;
    rv.failed = failed;
    rv.parity_nodes = prob.parity_nodes;
    rv.sys_nodes = prob.sys_nodes;
    for (std::size_t s = 0; s < prob.parity_nodes.size(); ++s) {
        for (std::size_t t = 0; t < prob.sys_nodes.size(); ++t) {
            rv.pairs.emplace_back(prob.parity_nodes[s], prob.sys_nodes[t]);
        }
    }

    // Powers of every interference diagonal up to delta, reused across columns.
    // pow_tab[pair][e][m] = (A_pair.d[m])^e, with 0^0 = 1.
    std::vector<std::vector<std::vector<u64>>> pow_tab(gamma);
    for (std::size_t s = 0, pair = 0; s < prob.parity_nodes.size(); ++s) {
        for (std::size_t t = 0; t < prob.sys_nodes.size(); ++t, ++pair) {
            const DiagonalMatrix& a = prob.interference[s][t];
            auto& tab = pow_tab[pair];
            tab.assign(p.delta + 1, std::vector<u64>(p.per_node));
            for (std::size_t m = 0; m < p.per_node; ++m) tab[0][m] = 1;
            for (std::size_t e = 1; e <= p.delta; ++e) {
                for (std::size_t m = 0; m < p.per_node; ++m) {
                    tab[e][m] = f.mul(tab[e - 1][m], a.d[m]);
                }
            }
        }
    }

    auto fill_columns = [&](FieldMatrix& out, std::size_t radix) {
        std::vector<std::size_t> alpha(gamma, 0);
        for (std::size_t c = 0; c < out.cols; ++c) {
            // decode c in the given radix, most significant digit first
            std::size_t rem = c;
            for (std::size_t pair = gamma; pair-- > 0;) {
                alpha[pair] = rem % radix;
                rem /= radix;
            }
            for (std::size_t m = 0; m < p.per_node; ++m) {
                u64 v = rv.w[m];
                for (std::size_t pair = 0; pair < gamma; ++pair) {
                    v = f.mul(v, pow_tab[pair][alpha[pair]][m]);
                }
                out.at(m, c) = v;
            }
        }
    };

    // align map is pure index arithmetic, independent of w
    rv.align.assign(gamma, std::vector<std::size_t>(p.sub_beta));
    {
        std::vector<std::size_t> alpha(gamma, 0);
        for (std::size_t c = 0; c < p.sub_beta; ++c) {
            std::size_t rem = c;
            for (std::size_t pair = gamma; pair-- > 0;) {
                alpha[pair] = rem % p.delta;
                rem /= p.delta;
            }
            for (std::size_t pair = 0; pair < gamma; ++pair) {
                ++alpha[pair];
                rv.align[pair][c] = encode_mixed_radix(alpha, p.delta + 1);
                --alpha[pair];
            }
        }
    }

    for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
        rv.w.resize(p.per_node);
        for (std::size_t m = 0; m < p.per_node; ++m) {
            SeededRng rng(seed, "w/" + std::to_string(failed) + "/" + std::to_string(attempt) +
                                    "/" + std::to_string(m));
            rv.w[m] = f.sample_nonzero(rng);
        }
        rv.V = FieldMatrix(p.per_node, p.sub_beta);
        rv.Vp = FieldMatrix(p.per_node, p.beta);
        fill_columns(rv.V, p.delta);
        fill_columns(rv.Vp, p.delta + 1);

        // Stack rows (V^T A_{j,failed}) per parity slot; for diagonal A the
        // (c, u) entry is V[u][c] * a_u.
        FieldMatrix stack(p.per_node, p.per_node);
        for (std::size_t s = 0; s < prob.parity_nodes.size(); ++s) {
            const DiagonalMatrix& a = prob.desired[s];
            for (std::size_t c = 0; c < p.sub_beta; ++c) {
                for (std::size_t u = 0; u < p.per_node; ++u) {
                    stack.at(s * p.sub_beta + c, u) = f.mul(rv.V.at(u, c), a.d[u]);
                }
            }
        }
        if (rank(f, stack) == p.per_node) {
            rv.solve_stack = std::move(stack);
            rv.attempts_used = attempt;
            return rv;
        }
    }
    throw RepairInfeasible("repair rank condition failed after " +
                           std::to_string(max_attempts) +
                           " w samples; resample the code or raise q");
}

inline std::vector<u64> project(const PrimeField& f, const FieldMatrix& basis,
                                const std::vector<u64>& data) {
    // basis^T * data
    std::vector<u64> out(basis.cols, 0);
    for (std::size_t m = 0; m < basis.rows; ++m) {
        u64 d = data[m];
        if (d == 0) continue;
        for (std::size_t c = 0; c < basis.cols; ++c) {
            out[c] = f.add(out[c], f.mul(basis.at(m, c), d));
        }
    }
    return out;
}

/// Interference cancellation plus the reconstruction solve. Returns the
/// regenerated per_node vector (x_f, or D_p in the transformed frame).
inline std::vector<u64> repair_from_downloads(const PrimeField& f, const CodeParams& p,
                                              const RepairVectors& rv,
                                              const DownloadBundle& bundle) {
    if (bundle.systematic.size() != rv.sys_nodes.size() ||
        bundle.parity.size() != rv.parity_nodes.size()) {
        throw std::invalid_argument("repair: bundle does not match repair vectors");
    }
    std::vector<u64> rhs(p.per_node);
    for (std::size_t s = 0; s < rv.parity_nodes.size(); ++s) {
        const auto& [pid, z] = bundle.parity[s];
        if (pid != rv.parity_nodes[s] || z.size() != p.sub_beta) {
            throw std::invalid_argument("repair: parity projection mismatch");
        }
        for (std::size_t c = 0; c < p.sub_beta; ++c) {
            u64 cleaned = z[c];
            for (std::size_t t = 0; t < rv.sys_nodes.size(); ++t) {
                const auto& [sid, y] = bundle.systematic[t];
                if (sid != rv.sys_nodes[t] || y.size() != p.beta) {
                    throw std::invalid_argument("repair: systematic projection mismatch");
                }
                cleaned = f.sub(cleaned, y[rv.align[s * rv.sys_nodes.size() + t][c]]);
            }
            rhs[s * p.sub_beta + c] = cleaned;
        }
    }
    try {
        return solve(f, rv.solve_stack, rhs);
    } catch (const SingularMatrix&) {
        throw std::logic_error("repair solve singular despite verified rank condition");
    }
}

}  // namespace detail

/// Repair vectors for a failed systematic node f in {1..k}. Samples w from
/// the (seed, "w/f/attempt/m") streams and retries until the stacked
/// reconstruction system is nonsingular.
inline RepairVectors build_repair_vectors(const MsrCode& code, std::size_t failed,
                                          std::size_t max_attempts = kDefaultMaxAttempts) {
    const CodeParams& p = code.params();
    if (failed < 1 || failed > p.k) {
        throw std::invalid_argument("build_repair_vectors: failed node must be systematic");
    }
    detail::RepairProblem prob;
    for (std::size_t j = p.k + 1; j <= p.n; ++j) prob.parity_nodes.push_back(j);
    for (std::size_t i = 1; i <= p.k; ++i) {
        if (i != failed) prob.sys_nodes.push_back(i);
    }
    for (std::size_t j : prob.parity_nodes) {
        prob.desired.push_back(code.coding(j, failed));
        std::vector<DiagonalMatrix> row;
        for (std::size_t i : prob.sys_nodes) row.push_back(code.coding(j, i));
        prob.interference.push_back(std::move(row));
    }
    return detail::build_vectors(code.field(), p, prob, code.seed(), failed, max_attempts);
}

/// Project the n-1 helper shards through the repair vectors. Helpers must be
/// exactly all nodes other than rv.failed.
inline DownloadBundle extract_downloads(const MsrCode& code, const RepairVectors& rv,
                                        const std::vector<NodeShard>& helpers) {
    const CodeParams& p = code.params();
    const PrimeField& f = code.field();
    std::vector<const NodeShard*> by_id(p.n + 1, nullptr);
    if (helpers.size() != p.n - 1) {
        throw std::invalid_argument("extract_downloads: need exactly n-1 helpers");
    }
    for (const NodeShard& s : helpers) {
        if (s.node_id < 1 || s.node_id > p.n || s.node_id == rv.failed || by_id[s.node_id]) {
            throw std::invalid_argument("extract_downloads: helpers must be all nodes except the failed one");
        }
        if (s.data.size() != p.per_node) {
            throw std::invalid_argument("extract_downloads: shard has wrong symbol count");
        }
        by_id[s.node_id] = &s;
    }
    DownloadBundle bundle;
    bundle.failed = rv.failed;
    for (std::size_t id : rv.sys_nodes) {
        bundle.systematic.emplace_back(id, detail::project(f, rv.Vp, by_id[id]->data));
    }
    for (std::size_t id : rv.parity_nodes) {
        bundle.parity.emplace_back(id, detail::project(f, rv.V, by_id[id]->data));
    }
    return bundle;
}

/// Regenerate systematic node f from its download bundle.
inline NodeShard repair_systematic(const MsrCode& code, std::size_t failed,
                                   const DownloadBundle& bundle, const RepairVectors& rv) {
    if (rv.failed != failed || bundle.failed != failed) {
        throw std::invalid_argument("repair_systematic: scenario mismatch");
    }
    return NodeShard{failed,
                     detail::repair_from_downloads(code.field(), code.params(), rv, bundle)};
}

/// Change-of-basis coefficients that recast repair of parity node p as repair
/// of a systematic node: with x'_1 = D_p as the unknown, node 1 and the other
/// parity nodes become the parity-role nodes of the transformed frame.
struct ParityTransform {
    std::size_t p = 0;
    std::vector<std::size_t> parity_nodes;  // {1} then {k+1..n} \ {p}
    // coeff[slot][0] multiplies x'_1; coeff[slot][t] multiplies x_{t+1} for t >= 1
    std::vector<std::vector<DiagonalMatrix>> coeff;
};

inline ParityTransform transform_for_parity(const MsrCode& code, std::size_t p) {
    const CodeParams& params = code.params();
    const PrimeField& f = code.field();
    if (p <= params.k || p > params.n) {
        throw std::invalid_argument("transform_for_parity: p must be a parity node");
    }
    const DiagonalMatrix& ap1 = code.coding(p, 1);
    DiagonalMatrix ap1_inv;
    ap1_inv.d.resize(params.per_node);
    for (std::size_t m = 0; m < params.per_node; ++m) ap1_inv.d[m] = f.inv(ap1.d[m]);

    ParityTransform t;
    t.p = p;
    t.parity_nodes.push_back(1);
    for (std::size_t j = params.k + 1; j <= params.n; ++j) {
        if (j != p) t.parity_nodes.push_back(j);
    }
    for (std::size_t j : t.parity_nodes) {
        std::vector<DiagonalMatrix> row;
        if (j == 1) {
            // x_1 = A_{p,1}^{-1} x'_1 - sum_{i>=2} A_{p,1}^{-1} A_{p,i} x_i
            row.push_back(ap1_inv);
            for (std::size_t i = 2; i <= params.k; ++i) {
                DiagonalMatrix c;
                c.d.resize(params.per_node);
                for (std::size_t m = 0; m < params.per_node; ++m) {
                    c.d[m] = f.neg(f.mul(ap1_inv.d[m], code.coding(p, i).d[m]));
                }
                row.push_back(std::move(c));
            }
        } else {
            // D_j = A_{j,1} A_{p,1}^{-1} x'_1 + sum_{i>=2} (A_{j,i} - A_{j,1} A_{p,1}^{-1} A_{p,i}) x_i
            DiagonalMatrix lead;
            lead.d.resize(params.per_node);
            for (std::size_t m = 0; m < params.per_node; ++m) {
                lead.d[m] = f.mul(code.coding(j, 1).d[m], ap1_inv.d[m]);
            }
            for (std::size_t i = 2; i <= params.k; ++i) {
                DiagonalMatrix c;
                c.d.resize(params.per_node);
                for (std::size_t m = 0; m < params.per_node; ++m) {
                    u64 cross = f.mul(lead.d[m], code.coding(p, i).d[m]);
                    c.d[m] = f.sub(code.coding(j, i).d[m], cross);
                }
                if (i == 2) row.push_back(lead);
                row.push_back(std::move(c));
            }
            if (params.k == 1) row.push_back(lead);  // unreachable: k >= 2
        }
        t.coeff.push_back(std::move(row));
    }
    return t;
}

/// Everything needed to regenerate parity node p: the transformed coefficient
/// family plus rank-verified repair vectors over it. Build once, reuse across
/// chunks.
struct ParityRepairPlan {
    ParityTransform transform;
    RepairVectors rv;
};

inline ParityRepairPlan build_parity_repair(const MsrCode& code, std::size_t p,
                                            std::size_t max_attempts = kDefaultMaxAttempts) {
    const CodeParams& params = code.params();
    ParityRepairPlan plan;
    plan.transform = transform_for_parity(code, p);
    detail::RepairProblem prob;
    prob.parity_nodes = plan.transform.parity_nodes;
    for (std::size_t i = 2; i <= params.k; ++i) prob.sys_nodes.push_back(i);
    for (std::size_t s = 0; s < prob.parity_nodes.size(); ++s) {
        prob.desired.push_back(plan.transform.coeff[s][0]);
        std::vector<DiagonalMatrix> row(plan.transform.coeff[s].begin() + 1,
                                        plan.transform.coeff[s].end());
        prob.interference.push_back(std::move(row));
    }
    plan.rv = detail::build_vectors(code.field(), params, prob, code.seed(), p, max_attempts);
    return plan;
}

/// Regenerate parity node p from all n-1 other nodes.
inline NodeShard repair_parity(const MsrCode& code, std::size_t p,
                               const std::vector<NodeShard>& helpers,
                               std::size_t max_attempts = kDefaultMaxAttempts) {
    ParityRepairPlan plan = build_parity_repair(code, p, max_attempts);
    DownloadBundle bundle = extract_downloads(code, plan.rv, helpers);
    return NodeShard{p, detail::repair_from_downloads(code.field(), code.params(), plan.rv,
                                                      bundle)};
}

/// Golden-instance repair of node 1 of the (4,2) fixture over GF(5): one
/// scalar from each helper against [1 1], interference cancelled through the
/// identity matrices, then a 2x2 solve. Three symbols total.
struct FixtureRepair {
    std::array<u64, 3> downloads{};  // projections from nodes 2, 3, 4
    std::array<u64, 2> cleaned{};
    NodeShard shard;  // regenerated node 1
};

inline FixtureRepair repair_fixture_4_2(const std::vector<NodeShard>& helpers) {
    PrimeField f(5);
    std::array<const NodeShard*, 5> by_id{};
    if (helpers.size() != 3) {
        throw std::invalid_argument("fixture repair: need helpers 2, 3, 4");
    }
    for (const NodeShard& s : helpers) {
        if (s.node_id < 2 || s.node_id > 4 || by_id[s.node_id] || s.data.size() != 2) {
            throw std::invalid_argument("fixture repair: need helpers 2, 3, 4");
        }
        by_id[s.node_id] = &s;
    }
    FixtureRepair out;
    for (std::size_t id = 2; id <= 4; ++id) {
        out.downloads[id - 2] = f.add(by_id[id]->data[0], by_id[id]->data[1]);
    }
    out.cleaned[0] = f.sub(out.downloads[1], out.downloads[0]);
    out.cleaned[1] = f.sub(out.downloads[2], out.downloads[0]);
    // rows (A_{3,1} v)^T and (A_{4,1} v)^T for v = [1 1]
    FieldMatrix sys(2, 2);
    sys.at(0, 0) = 1;
    sys.at(0, 1) = 2;
    sys.at(1, 0) = 2;
    sys.at(1, 1) = 1;
    out.shard.node_id = 1;
    out.shard.data = solve(f, sys, std::vector<u64>{out.cleaned[0], out.cleaned[1]});
    return out;
}

}  // namespace msra
