#ifndef FACEBENCH_RECON_LAYERS_HPP
#define FACEBENCH_RECON_LAYERS_HPP

#include <vector>

#include <Eigen/Dense>

#include "facebench/imaging/image.hpp"

namespace facebench::recon {

// Dense channel-major activation map: value (c, y, x) lives at
// v[(c*h + y)*w + x]. Double precision throughout so finite-difference
// gradient oracles are meaningful.
struct Tensor {
    int c = 0, h = 0, w = 0;
    std::vector<double> v;

    Tensor() = default;
    Tensor(int c_, int h_, int w_) : c(c_), h(h_), w(w_), v(static_cast<std::size_t>(c_) * h_ * w_, 0.0) {}

    double& at(int ci, int y, int x) { return v[(static_cast<std::size_t>(ci) * h + y) * w + x]; }
    double at(int ci, int y, int x) const { return v[(static_cast<std::size_t>(ci) * h + y) * w + x]; }
    std::size_t size() const { return v.size(); }
    bool same_shape(const Tensor& o) const { return c == o.c && h == o.h && w == o.w; }
};

Tensor tensor_from_image(const Image& img);
Image image_from_tensor(const Tensor& t);

// Patch matrix for convolution-as-GEMM: column j enumerates the sliding
// window anchored at strided position j; row (ci*k + ky)*k + kx holds the
// input value under kernel tap (ky, kx), zero when the tap falls outside.
Eigen::MatrixXd im2col(const Tensor& x, int k, int stride, int pad);

// Exact adjoint of im2col: scatter-add each column back through the same
// index map into a (c, h, w) tensor. Columns enumerate the same strided
// positions im2col would produce for an input of that shape.
Tensor col2im(const Eigen::MatrixXd& cols, int c, int h, int w, int k, int stride, int pad);

inline int conv_out_extent(int in, int k, int stride, int pad) {
    return (in + 2 * pad - k) / stride + 1;
}

// 2-D convolution; weight rows index output channels, weight columns flatten
// (in_channel, ky, kx) in the im2col row order.
struct Conv {
    int in_c = 0, out_c = 0, k = 3, stride = 1, pad = 1;
    Eigen::MatrixXd W;  // {out_c, in_c*k*k}
    Eigen::VectorXd b;  // {out_c}

    Tensor forward(const Tensor& x) const;
    // Accumulates (+=) parameter gradients, returns the input gradient.
    Tensor backward(const Tensor& x, const Tensor& dy, Eigen::Ref<Eigen::MatrixXd> dW,
                    Eigen::Ref<Eigen::VectorXd> db) const;
    std::ptrdiff_t parameter_count() const { return W.size() + b.size(); }
};

// Stride-2 transposed convolution with an extra output row/column so the
// spatial extent exactly doubles. Forward is the adjoint of a stride-2
// convolution: spread each input pixel through the kernel into the output.
struct Tconv {
    int in_c = 0, out_c = 0, k = 3, stride = 2, pad = 1;
    Eigen::MatrixXd W;  // {in_c, out_c*k*k}
    Eigen::VectorXd b;  // {out_c}

    Tensor forward(const Tensor& x) const;
    Tensor backward(const Tensor& x, const Tensor& dy, Eigen::Ref<Eigen::MatrixXd> dW,
                    Eigen::Ref<Eigen::VectorXd> db) const;
    std::ptrdiff_t parameter_count() const { return W.size() + b.size(); }
};

// Elementwise nonlinearities. Backward masks use the stored *outputs*:
// relu(x) > 0 iff x > 0, and d sigmoid = y*(1-y).
Tensor relu(const Tensor& x);
Tensor relu_backward(const Tensor& dy, const Tensor& y);
Tensor sigmoid(const Tensor& x);
Tensor sigmoid_backward(const Tensor& dy, const Tensor& y);
Tensor add(const Tensor& a, const Tensor& b);

} // namespace facebench::recon

#endif
