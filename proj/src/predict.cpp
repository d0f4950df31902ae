#include "hyperdisp/predict.hpp"

#include <algorithm>
#include <stdexcept>

namespace hyperdisp {

PQ PQ::parse(const std::string& p, const std::string& q) {
    auto inv = [](const std::string& s) -> Rational {
        if (s == "inf" || s == "infinity") return Rational(0);
        Rational v = Rational::parse(s);
        if (v.num <= 0) throw std::invalid_argument("PQ: exponent must be positive or 'inf'");
        return Rational(v.den, v.num);
    };
    PQ pq;
    pq.inv_p = inv(p);
    pq.inv_q = inv(q);
    if (pq.inv_p + pq.inv_q != Rational(1))
        throw std::invalid_argument("PQ: p and q must be conjugate (1/p + 1/q = 1)");
    if (pq.inv_p < Rational(1, 2) || Rational(1) < pq.inv_p)
        throw std::invalid_argument("PQ: need 1 <= p <= 2");
    return pq;
}

std::string PQ::str() const {
    auto show = [](const Rational& r) -> std::string {
        if (r.num == 0) return "inf";
        return Rational(r.den, r.num).str();
    };
    return "(" + show(inv_p) + "," + show(inv_q) + ")";
}

namespace {

KFactor make_poly_row(Rational rho, int lambda, const std::string& prov) {
    KFactor k;
    k.rho = rho;
    k.lambda = lambda;
    k.delta = 0.0;
    k.provenance = prov;
    return k;
}

KFactor make_exp_row(double delta, int lambda, const std::string& prov) {
    KFactor k;
    k.rho = Rational(0);
    k.lambda = lambda;
    k.delta = delta;
    k.provenance = prov;
    return k;
}

}  // namespace

RowResult row_large_freq(const RootClassification& rc, int n, const PQ& pq,
                         const std::string& zone_tag) {
    RowResult out;
    const Rational diff = pq.diff();
    switch (rc.axis.kind) {
        case AxisKind::Separated:
            out.rows.push_back(make_exp_row(rc.axis.delta, 0, "I:away_from_axis" + zone_tag));
            return out;
        case AxisKind::UnclassifiedAsymptotic:
            out.abstained = true;
            out.reason = "root approaches the real axis asymptotically; no table row" + zone_tag;
            return out;
        case AxisKind::MeetsFiniteOrder:
            out.abstained = true;
            out.reason = "axis contact inside the large-frequency shell; "
                         "perturbation regime not established" + zone_tag;
            return out;
        case AxisKind::OnAxis:
            break;
    }
    if (rc.hessian && rc.hessian->kind == HessKind::NonDegenerate) {
        out.rows.push_back(
            make_poly_row(-Rational(n, 2) * diff, 0, "I:onaxis_hess_nondeg" + zone_tag));
        return out;
    }
    if (rc.hessian && rc.hessian->kind == HessKind::RankDeficient) {
        out.rows.push_back(
            make_poly_row(-Rational(n - 1, 2) * diff, 0, "I:onaxis_rank_n-1" + zone_tag));
        return out;
    }
    if (rc.contact && !rc.contact->infinite_flag) {
        if (rc.contact->convex) {
            out.rows.push_back(make_poly_row(-Rational(n - 1, rc.contact->gamma) * diff, 0,
                                             "I:onaxis_convex_gamma" + zone_tag));
        } else {
            // Part I non-convex row has no (1/p - 1/q) factor
            out.rows.push_back(make_poly_row(-Rational(1, rc.contact->gamma0), 0,
                                             "I:onaxis_nonconvex_gamma0" + zone_tag));
        }
        return out;
    }
    out.abstained = true;
    out.reason = (rc.contact && rc.contact->infinite_flag)
                     ? "infinite-order tangent contact; no table row" + zone_tag
                     : "on-axis root with no certified Hessian or convexity class" + zone_tag;
    return out;
}

RowResult row_bounded_freq(const RootClassification& rc, int n, const PQ& pq,
                           const std::string& zone_tag) {
    RowResult out;
    const Rational diff = pq.diff();
    switch (rc.axis.kind) {
        case AxisKind::Separated:
            out.rows.push_back(make_exp_row(rc.axis.delta, 0, "II:away_no_mult" + zone_tag));
            return out;
        case AxisKind::UnclassifiedAsymptotic:
            out.abstained = true;
            out.reason = "unclassified asymptotic axis approach" + zone_tag;
            return out;
        case AxisKind::MeetsFiniteOrder: {
            // single root meeting the axis: L = 1, ell = codim of Z_k
            int s = std::max(1, rc.axis.s);
            int ell = rc.axis.contact_codim > 0 ? rc.axis.contact_codim : n;
            out.rows.push_back(make_poly_row(-Rational(ell, s) * diff, 0,
                                             "II:meets_axis_finite_order" + zone_tag));
            return out;
        }
        case AxisKind::OnAxis:
            break;
    }
    if (rc.hessian && rc.hessian->kind == HessKind::NonDegenerate) {
        KFactor k = make_poly_row(-Rational(n, 2) * diff, 0, "II:onaxis_hess_nondeg" + zone_tag);
        out.rows.push_back(k);
        return out;
    }
    // the convexity rows carry the * regularity assumption
    if (!rc.smallxi_ok) {
        out.abstained = true;
        out.reason = "regularity condition |d_omega tau| >= C0 fails on bounded frequencies" +
                     zone_tag;
        return out;
    }
    if (rc.contact && !rc.contact->infinite_flag) {
        if (rc.contact->convex) {
            out.rows.push_back(make_poly_row(-Rational(n - 1, rc.contact->gamma) * diff, 0,
                                             "II:onaxis_convex_gamma" + zone_tag));
        } else {
            out.rows.push_back(make_poly_row(-Rational(1, rc.contact->gamma0) * diff, 0,
                                             "II:onaxis_nonconvex_gamma0" + zone_tag));
        }
        return out;
    }
    if (rc.contact && rc.contact->infinite_flag) {
        out.abstained = true;
        out.reason = "infinite-order tangent contact; no table row" + zone_tag;
        return out;
    }
    if (n == 1) {
        // 1-d fully degenerate Hessian (e.g. the wave): bounded, no decay row
        out.rows.push_back(make_poly_row(Rational(0), 0, "II:onaxis_no_decay_row" + zone_tag));
        return out;
    }
    out.abstained = true;
    out.reason = "on-axis root with no certified classification" + zone_tag;
    return out;
}

RowResult row_bounded_mult(const AxisBehavior& collective, int L, int ell, const PQ& pq,
                           const std::string& zone_tag) {
    RowResult out;
    const Rational diff = pq.diff();
    switch (collective.kind) {
        case AxisKind::Separated:
            out.rows.push_back(
                make_exp_row(collective.delta, L, "II:away_L_coincide" + zone_tag));
            return out;
        case AxisKind::OnAxis: {
            // shrinking-neighborhood L^1 -> L^inf row, flagged and kept out of kappa
            KFactor k = make_poly_row(Rational(L - 1 - ell), 0,
                                      "II:onaxis_mult_shrinking" + zone_tag);
            k.shrinking_region = true;
            out.rows.push_back(k);
            return out;
        }
        case AxisKind::MeetsFiniteOrder: {
            int s = std::max(1, collective.s);
            out.rows.push_back(make_poly_row(-Rational(ell, s) * diff, L - 1,
                                             "II:mult_meets_axis_finite_order" + zone_tag));
            return out;
        }
        case AxisKind::UnclassifiedAsymptotic:
            out.abstained = true;
            out.reason = "multiplicity neighborhood with asymptotic axis approach" + zone_tag;
            return out;
    }
    out.abstained = true;
    out.reason = "unreachable multiplicity classification" + zone_tag;
    return out;
}

DecayPrediction combine(const std::vector<KFactor>& rows, const PQ& pq) {
    (void)pq;
    if (rows.empty()) throw std::invalid_argument("combine: no rows");
    DecayPrediction pred;
    bool have = false;
    for (const KFactor& k : rows) {
        if (k.shrinking_region) {
            pred.shrinking_rows.push_back(k);
            continue;
        }
        if (!have || k.slower_than(pred.K)) {
            pred.K = k;
            have = true;
        }
    }
    if (!have) {
        // only shrinking-region rows exist: keep the slowest as the envelope
        // but mark it; kappa stays undefined through the exponential sentinel
        pred.K = pred.shrinking_rows.front();
        for (const KFactor& k : pred.shrinking_rows)
            if (k.slower_than(pred.K)) pred.K = k;
        pred.exponential_only = false;
        pred.kappa = -(pred.K.rho + Rational(pred.K.lambda));
        return pred;
    }
    if (pred.K.delta > 0.0) {
        pred.exponential_only = true;  // kappa = +infinity sentinel
    } else {
        pred.kappa = -(pred.K.rho + Rational(pred.K.lambda));
    }
    return pred;
}

StrichartzExponents strichartz_pair(const Rational& kappa) {
    StrichartzExponents st;
    if (kappa <= Rational(0) || Rational(1) <= kappa) {
        st.admissible = false;
        return st;
    }
    st.inv_q = Rational(1) - kappa / Rational(2);  // 1/q = 1 - kappa/2
    st.inv_q_conj = Rational(1) - st.inv_q;
    st.admissible = true;
    return st;
}

DecayPrediction fp_prediction(const ZoneReport& report) {
    DecayPrediction pred;
    auto fail = [&](const std::string& why) {
        pred.abstained = true;
        pred.abstain_reasons.push_back("strong stability certificate failed: " + why);
        return pred;
    };
    if (!report.stability.pass) return fail("Im tau < 0 somewhere on the grid");
    if (!(report.edge_min_im > 0.0))
        return fail("liminf of Im tau at the grid edge is not positive");

    int origin_contacts = 0;
    int s = 2;
    for (const auto& z : report.zones) {
        if (z.kind == ZoneKind::MultNeighborhood) {
            if (z.collective.kind == AxisKind::OnAxis)
                return fail("roots lie on the axis inside a multiplicity neighborhood");
            continue;
        }
        for (const auto& [k, rc] : z.per_root) {
            switch (rc.axis.kind) {
                case AxisKind::Separated:
                    break;
                case AxisKind::MeetsFiniteOrder:
                    if (!rc.axis.contact_at_origin)
                        return fail("axis contact away from xi = 0");
                    if (!rc.axis.s1)
                        return fail("contact root does not vanish at xi = 0");
                    origin_contacts += 1;
                    s = rc.axis.s;
                    break;
                case AxisKind::OnAxis:
                    return fail("a root lies on the real axis");
                case AxisKind::UnclassifiedAsymptotic:
                    return fail("asymptotic approach to the real axis");
            }
        }
    }
    if (origin_contacts == 0) return fail("no axis contact at the origin found");
    if (origin_contacts > 1) return fail("more than one root touches the axis at the origin");

    pred.fp_two_term = true;
    pred.fp_poly_rate = Rational(report.dim, s);  // n/s at (1,inf); s = 2 for Fokker-Planck
    pred.fp_eps = report.edge_min_im;
    pred.K = make_poly_row(-pred.fp_poly_rate, 0, "FP:two_term_polynomial_part");
    pred.kappa = pred.fp_poly_rate;
    return pred;
}

PredictOutcome predict_report(const ZoneReport& report, const PQ& pq) {
    PredictOutcome out;
    if (!report.stability.pass) {
        out.prediction.abstained = true;
        out.prediction.abstain_reasons.push_back(
            "stability condition Im tau >= 0 fails (min Im = " +
            std::to_string(report.stability.min_im) + "); no decay expected");
        return out;
    }

    std::vector<KFactor> rows;
    std::vector<std::string> abstain;
    const AxisBehavior* winning_contact = nullptr;

    for (const auto& z : report.zones) {
        std::string tag = " @zone" + std::to_string(z.id);
        if (z.kind == ZoneKind::MultNeighborhood) {
            const MultiplicitySet& ms = report.mults[z.mult_index];
            RowResult r = row_bounded_mult(z.collective, ms.L, ms.codim, pq, tag);
            for (auto& k : r.rows) {
                out.trace.push_back({z.id, k.provenance, k, false, ""});
                rows.push_back(k);
            }
            if (r.abstained) {
                out.trace.push_back({z.id, "abstain", std::nullopt, true, r.reason});
                abstain.push_back(r.reason);
            }
            continue;
        }
        for (const auto& [k, rc] : z.per_root) {
            RowResult r = (z.kind == ZoneKind::LargeShell)
                              ? row_large_freq(rc, report.dim, pq, tag)
                              : row_bounded_freq(rc, report.dim, pq, tag);
            for (auto& kf : r.rows) {
                out.trace.push_back({z.id, kf.provenance, kf, false, ""});
                rows.push_back(kf);
            }
            if (r.abstained) {
                out.trace.push_back({z.id, "abstain", std::nullopt, true, r.reason});
                abstain.push_back(r.reason);
            }
        }
    }

    if (rows.empty()) {
        out.prediction.abstained = true;
        out.prediction.abstain_reasons = abstain;
        if (abstain.empty())
            out.prediction.abstain_reasons.push_back("no table rows produced");
        return out;
    }
    out.prediction = combine(rows, pq);
    out.prediction.abstain_reasons = abstain;

    // improvement exponents when the envelope is a finite-order contact row
    if (out.prediction.K.provenance.rfind("II:meets_axis", 0) == 0) {
        // locate the matching axis behavior to read s, s1, xi0
        for (const auto& z : report.zones) {
            if (z.kind == ZoneKind::MultNeighborhood) continue;
            for (const auto& [k, rc] : z.per_root)
                if (rc.axis.kind == AxisKind::MeetsFiniteOrder &&
                    out.prediction.K.provenance.find("@zone" + std::to_string(z.id)) !=
                        std::string::npos)
                    winning_contact = &rc.axis;
        }
        if (winning_contact) {
            int s = std::max(1, winning_contact->s);
            if (winning_contact->contact_at_origin) {
                out.prediction.improvements.space_gain = true;
                out.prediction.improvements.per_alpha = Rational(1, s);
            }
            if (winning_contact->s1) {
                out.prediction.improvements.time_gain = true;
                out.prediction.improvements.per_r = Rational(*winning_contact->s1, s);
            }
        }
    }
    out.prediction.sobolev_note =
        "N_p >= n(1/p-1/q) for 1<p<=2, N_1 > n for p=1 (orders reported, not verified)";
    return out;
}

std::vector<std::string> table_row_ids() {
    return {
        "I:away_from_axis",      "I:onaxis_hess_nondeg",   "I:onaxis_rank_n-1",
        "I:onaxis_convex_gamma", "I:onaxis_nonconvex_gamma0",
        "II:away_no_mult",       "II:away_L_coincide",     "II:onaxis_hess_nondeg",
        "II:onaxis_convex_gamma", "II:onaxis_nonconvex_gamma0",
        "II:onaxis_mult_shrinking", "II:mult_meets_axis_finite_order",
        "II:meets_axis_finite_order",
    };
}

}  // namespace hyperdisp
