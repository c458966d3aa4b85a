// SPDX-License-Identifier: Apache-2.0
#include "neural/gru.hpp"

#include <cmath>

namespace hbrom::neural {

namespace {
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
} // namespace

void GruGrads::match_shapes(const GruParams& p) {
    const std::size_t h = p.hidden_width();
    const std::size_t in = p.input_width();
    if (wz.rows() == h && wz.cols() == in && uz.rows() == h && biz.size() == h) return;
    wz = numkit::DenseMatrix(h, in);
    wr = numkit::DenseMatrix(h, in);
    wn = numkit::DenseMatrix(h, in);
    uz = numkit::DenseMatrix(h, h);
    ur = numkit::DenseMatrix(h, h);
    un = numkit::DenseMatrix(h, h);
    biz.assign(h, 0.0);
    bir.assign(h, 0.0);
    bin_.assign(h, 0.0);
    bhz.assign(h, 0.0);
    bhr.assign(h, 0.0);
    bhn.assign(h, 0.0);
}

void GruGrads::zero() {
    for (auto* m : {&wz, &wr, &wn, &uz, &ur, &un})
        std::fill(m->data().begin(), m->data().end(), 0.0);
    for (auto* v : {&biz, &bir, &bin_, &bhz, &bhr, &bhn}) std::fill(v->begin(), v->end(), 0.0);
}

std::vector<ParamBlock> GruParams::param_blocks(const std::string& prefix, GruGrads& grads) {
    if (grads.wz.rows() != hidden_width()) grads.match_shapes(*this);
    std::vector<ParamBlock> blocks;
    auto add_m = [&](const char* tag, numkit::DenseMatrix& v, numkit::DenseMatrix& g) {
        blocks.push_back({prefix + "." + tag, v.data().data(), g.data().data(), v.data().size(),
                          &version});
    };
    auto add_v = [&](const char* tag, std::vector<double>& v, std::vector<double>& g) {
        blocks.push_back({prefix + "." + tag, v.data(), g.data(), v.size(), &version});
    };
    add_m("wz", wz, grads.wz);
    add_m("wr", wr, grads.wr);
    add_m("wn", wn, grads.wn);
    add_m("uz", uz, grads.uz);
    add_m("ur", ur, grads.ur);
    add_m("un", un, grads.un);
    add_v("biz", biz, grads.biz);
    add_v("bir", bir, grads.bir);
    add_v("bin", bin_, grads.bin_);
    add_v("bhz", bhz, grads.bhz);
    add_v("bhr", bhr, grads.bhr);
    add_v("bhn", bhn, grads.bhn);
    return blocks;
}

GruParams make_gru(std::size_t input, std::size_t hidden, Rng& rng) {
    GruParams p;
    const double wb = std::sqrt(1.0 / static_cast<double>(input));
    const double ub = std::sqrt(1.0 / static_cast<double>(hidden));
    auto fill_m = [&](numkit::DenseMatrix& m, std::size_t rows, std::size_t cols, double bound) {
        m = numkit::DenseMatrix(rows, cols);
        for (auto& v : m.data()) v = rng.uniform(-bound, bound);
    };
    auto fill_v = [&](std::vector<double>& v, double bound) {
        v.assign(hidden, 0.0);
        for (auto& x : v) x = rng.uniform(-bound, bound);
    };
    fill_m(p.wz, hidden, input, wb);
    fill_m(p.wr, hidden, input, wb);
    fill_m(p.wn, hidden, input, wb);
    fill_m(p.uz, hidden, hidden, ub);
    fill_m(p.ur, hidden, hidden, ub);
    fill_m(p.un, hidden, hidden, ub);
    fill_v(p.biz, ub);
    fill_v(p.bir, ub);
    fill_v(p.bin_, ub);
    fill_v(p.bhz, ub);
    fill_v(p.bhr, ub);
    fill_v(p.bhn, ub);
    return p;
}

std::vector<double> gru_step(const GruParams& p, std::span<const double> h_prev,
                             std::span<const double> x, GruTape* tape) {
    const std::size_t h = p.hidden_width();
    if (h_prev.size() != h || x.size() != p.input_width())
        fail(ErrorKind::shape, "gru_step: width mismatch");

    std::vector<double> z(h), r(h), n(h), hk(h), h_next(h);
    for (std::size_t i = 0; i < h; ++i) {
        double az = p.biz[i] + p.bhz[i];
        double ar = p.bir[i] + p.bhr[i];
        double an_in = p.bin_[i];
        double ak = p.bhn[i];
        const double* wzi = p.wz.row_ptr(i);
        const double* wri = p.wr.row_ptr(i);
        const double* wni = p.wn.row_ptr(i);
        for (std::size_t j = 0; j < x.size(); ++j) {
            az += wzi[j] * x[j];
            ar += wri[j] * x[j];
            an_in += wni[j] * x[j];
        }
        const double* uzi = p.uz.row_ptr(i);
        const double* uri = p.ur.row_ptr(i);
        const double* uni = p.un.row_ptr(i);
        for (std::size_t j = 0; j < h; ++j) {
            az += uzi[j] * h_prev[j];
            ar += uri[j] * h_prev[j];
            ak += uni[j] * h_prev[j];
        }
        z[i] = sigmoid(az);
        r[i] = sigmoid(ar);
        hk[i] = ak;
        n[i] = std::tanh(an_in + r[i] * ak);
        h_next[i] = (1.0 - z[i]) * n[i] + z[i] * h_prev[i];
    }
    if (tape) {
        tape->x.assign(x.begin(), x.end());
        tape->h_prev.assign(h_prev.begin(), h_prev.end());
        tape->z = z;
        tape->r = r;
        tape->n = n;
        tape->hk = hk;
        tape->version = p.version;
    }
    return h_next;
}

void gru_vjp(const GruParams& p, const GruTape& tape, std::span<const double> dh_next,
             std::vector<double>& dh_prev, std::vector<double>& dx, GruGrads& grads) {
    if (tape.version != p.version)
        fail(ErrorKind::invalid_argument,
             "gru_vjp: tape is stale (parameters were mutated after the forward pass)");
    const std::size_t h = p.hidden_width();
    const std::size_t in = p.input_width();
    if (dh_next.size() != h) fail(ErrorKind::shape, "gru_vjp: cotangent width mismatch");
    if (grads.wz.rows() != h) grads.match_shapes(p);

    dh_prev.assign(h, 0.0);
    dx.assign(in, 0.0);
    std::vector<double> dz_pre(h), dr_pre(h), dn_pre(h), dk(h);
    for (std::size_t i = 0; i < h; ++i) {
        const double dh = dh_next[i];
        const double dz = dh * (tape.h_prev[i] - tape.n[i]);
        const double dn = dh * (1.0 - tape.z[i]);
        dh_prev[i] += dh * tape.z[i];
        const double dn_p = dn * (1.0 - tape.n[i] * tape.n[i]);
        dn_pre[i] = dn_p;
        const double dr = dn_p * tape.hk[i];
        dk[i] = dn_p * tape.r[i];
        dz_pre[i] = dz * tape.z[i] * (1.0 - tape.z[i]);
        dr_pre[i] = dr * tape.r[i] * (1.0 - tape.r[i]);
    }
    for (std::size_t i = 0; i < h; ++i) {
        double* gwz = grads.wz.row_ptr(i);
        double* gwr = grads.wr.row_ptr(i);
        double* gwn = grads.wn.row_ptr(i);
        for (std::size_t j = 0; j < in; ++j) {
            gwz[j] += dz_pre[i] * tape.x[j];
            gwr[j] += dr_pre[i] * tape.x[j];
            gwn[j] += dn_pre[i] * tape.x[j];
        }
        double* guz = grads.uz.row_ptr(i);
        double* gur = grads.ur.row_ptr(i);
        double* gun = grads.un.row_ptr(i);
        for (std::size_t j = 0; j < h; ++j) {
            guz[j] += dz_pre[i] * tape.h_prev[j];
            gur[j] += dr_pre[i] * tape.h_prev[j];
            gun[j] += dk[i] * tape.h_prev[j];
        }
        grads.biz[i] += dz_pre[i];
        grads.bir[i] += dr_pre[i];
        grads.bin_[i] += dn_pre[i];
        grads.bhz[i] += dz_pre[i];
        grads.bhr[i] += dr_pre[i];
        grads.bhn[i] += dk[i];
    }
    for (std::size_t i = 0; i < h; ++i) {
        const double* wzi = p.wz.row_ptr(i);
        const double* wri = p.wr.row_ptr(i);
        const double* wni = p.wn.row_ptr(i);
        for (std::size_t j = 0; j < in; ++j)
            dx[j] += wzi[j] * dz_pre[i] + wri[j] * dr_pre[i] + wni[j] * dn_pre[i];
        const double* uzi = p.uz.row_ptr(i);
        const double* uri = p.ur.row_ptr(i);
        const double* uni = p.un.row_ptr(i);
        for (std::size_t j = 0; j < h; ++j)
            dh_prev[j] += uzi[j] * dz_pre[i] + uri[j] * dr_pre[i] + uni[j] * dk[i];
    }
}

} // namespace hbrom::neural
