#include <cmath>

#include "facebench/core/error.hpp"
#include "facebench/recon/layers.hpp"

namespace facebench::recon {

Tensor tensor_from_image(const Image& img) {
    Tensor t(3, img.height(), img.width());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            for (int c = 0; c < 3; ++c) t.at(c, y, x) = img.at(x, y, c);
    return t;
}

Image image_from_tensor(const Tensor& t) {
    if (t.c != 3) throw ContractViolation("Image conversion requires a 3-channel tensor");
    Image img(t.w, t.h);
    for (int y = 0; y < t.h; ++y)
        for (int x = 0; x < t.w; ++x)
            for (int c = 0; c < 3; ++c) img.at(x, y, c) = static_cast<float>(t.at(c, y, x));
    return img;
}

Eigen::MatrixXd im2col(const Tensor& x, int k, int stride, int pad) {
    const int oh = conv_out_extent(x.h, k, stride, pad);
    const int ow = conv_out_extent(x.w, k, stride, pad);
    Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(x.c) * k * k,
                                                 static_cast<Eigen::Index>(oh) * ow);
    for (int ci = 0; ci < x.c; ++ci)
        for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx) {
                const Eigen::Index row = (static_cast<Eigen::Index>(ci) * k + ky) * k + kx;
                for (int oy = 0; oy < oh; ++oy) {
                    const int iy = oy * stride - pad + ky;
                    if (iy < 0 || iy >= x.h) continue;
                    for (int ox = 0; ox < ow; ++ox) {
                        const int ix = ox * stride - pad + kx;
                        if (ix < 0 || ix >= x.w) continue;
                        cols(row, static_cast<Eigen::Index>(oy) * ow + ox) = x.at(ci, iy, ix);
                    }
                }
            }
    return cols;
}

Tensor col2im(const Eigen::MatrixXd& cols, int c, int h, int w, int k, int stride, int pad) {
    const int oh = conv_out_extent(h, k, stride, pad);
    const int ow = conv_out_extent(w, k, stride, pad);
    if (cols.rows() != static_cast<Eigen::Index>(c) * k * k ||
        cols.cols() != static_cast<Eigen::Index>(oh) * ow)
        throw ContractViolation("col2im shape mismatch");
    Tensor out(c, h, w);
    for (int ci = 0; ci < c; ++ci)
        for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx) {
                const Eigen::Index row = (static_cast<Eigen::Index>(ci) * k + ky) * k + kx;
                for (int oy = 0; oy < oh; ++oy) {
                    const int iy = oy * stride - pad + ky;
                    if (iy < 0 || iy >= h) continue;
                    for (int ox = 0; ox < ow; ++ox) {
                        const int ix = ox * stride - pad + kx;
                        if (ix < 0 || ix >= w) continue;
                        out.at(ci, iy, ix) += cols(row, static_cast<Eigen::Index>(oy) * ow + ox);
                    }
                }
            }
    return out;
}

namespace {

Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
flat(const Tensor& t) {
    return {t.v.data(), t.c, static_cast<Eigen::Index>(t.h) * t.w};
}

Tensor tensor_from_flat(const Eigen::MatrixXd& m, int c, int h, int w) {
    Tensor t(c, h, w);
    for (int ci = 0; ci < c; ++ci)
        for (Eigen::Index j = 0; j < m.cols(); ++j) t.v[ci * m.cols() + j] = m(ci, j);
    return t;
}

} // namespace

Tensor Conv::forward(const Tensor& x) const {
    if (x.c != in_c) throw ContractViolation("Conv input channel mismatch");
    const int oh = conv_out_extent(x.h, k, stride, pad);
    const int ow = conv_out_extent(x.w, k, stride, pad);
    const Eigen::MatrixXd cols = im2col(x, k, stride, pad);
    Eigen::MatrixXd y = W * cols;
    y.colwise() += b;
    return tensor_from_flat(y, out_c, oh, ow);
}

Tensor Conv::backward(const Tensor& x, const Tensor& dy, Eigen::Ref<Eigen::MatrixXd> dW,
                      Eigen::Ref<Eigen::VectorXd> db) const {
    const Eigen::MatrixXd cols = im2col(x, k, stride, pad);
    const auto dy_flat = flat(dy);
    dW.noalias() += dy_flat * cols.transpose();
    db.noalias() += dy_flat.rowwise().sum();
    const Eigen::MatrixXd dcols = W.transpose() * dy_flat;
    return col2im(dcols, x.c, x.h, x.w, k, stride, pad);
}

Tensor Tconv::forward(const Tensor& x) const {
    if (x.c != in_c) throw ContractViolation("Tconv input channel mismatch");
    const int oh = x.h * stride;
    const int ow = x.w * stride;
    // Columns enumerate input positions; scattering them through the conv
    // index map for an output of (oh, ow) realizes the transposed stride.
    const Eigen::MatrixXd cols = W.transpose() * flat(x);
    Tensor y = col2im(cols, out_c, oh, ow, k, stride, pad);
    for (int ci = 0; ci < out_c; ++ci)
        for (int yx = 0; yx < oh * ow; ++yx) y.v[static_cast<std::size_t>(ci) * oh * ow + yx] += b(ci);
    return y;
}

Tensor Tconv::backward(const Tensor& x, const Tensor& dy, Eigen::Ref<Eigen::MatrixXd> dW,
                       Eigen::Ref<Eigen::VectorXd> db) const {
    const Eigen::MatrixXd dcols = im2col(dy, k, stride, pad);
    const auto x_flat = flat(x);
    dW.noalias() += x_flat * dcols.transpose();
    for (int ci = 0; ci < out_c; ++ci) {
        double s = 0.0;
        for (int yx = 0; yx < dy.h * dy.w; ++yx)
            s += dy.v[static_cast<std::size_t>(ci) * dy.h * dy.w + yx];
        db(ci) += s;
    }
    const Eigen::MatrixXd dx = W * dcols;
    return tensor_from_flat(dx, x.c, x.h, x.w);
}

Tensor relu(const Tensor& x) {
    Tensor y = x;
    for (double& v : y.v) v = v > 0.0 ? v : 0.0;
    return y;
}

Tensor relu_backward(const Tensor& dy, const Tensor& y) {
    Tensor dx = dy;
    for (std::size_t i = 0; i < dx.v.size(); ++i)
        if (y.v[i] <= 0.0) dx.v[i] = 0.0;
    return dx;
}

Tensor sigmoid(const Tensor& x) {
    Tensor y = x;
    for (double& v : y.v) v = 1.0 / (1.0 + std::exp(-v));
    return y;
}

Tensor sigmoid_backward(const Tensor& dy, const Tensor& y) {
    Tensor dx = dy;
    for (std::size_t i = 0; i < dx.v.size(); ++i) dx.v[i] *= y.v[i] * (1.0 - y.v[i]);
    return dx;
}

Tensor add(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) throw ContractViolation("Tensor add requires equal shapes");
    Tensor out = a;
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += b.v[i];
    return out;
}

} // namespace facebench::recon
