#ifndef FACEBENCH_RECON_UNET_HPP
#define FACEBENCH_RECON_UNET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "facebench/imaging/image.hpp"
#include "facebench/recon/layers.hpp"

namespace facebench::recon {

// Image-to-image encoder/decoder with strided-convolution downsampling,
// transposed-convolution upsampling, and per-resolution additive skip
// connections (the encoder map is added into the decoder map, keeping channel
// counts equal instead of doubling them as concatenation would).
struct UNetConfig {
    int input_size = 128;   // square spatial extent; must be divisible by 2^depth
    int depth = 4;          // number of down/up stages
    int base_channels = 32; // channels at the first stage; x2 per stage

    int stage_channels(int stage) const { return base_channels << stage; }
};

// One resolution level. Encoder: 3x3 conv + ReLU (the skip source), then
// stride-2 3x3 conv + ReLU. Decoder mirror: stride-2 transposed conv + ReLU,
// add the skip, then 3x3 conv + ReLU.
struct EncoderStage {
    Conv conv_a;  // feature conv at this resolution
    Conv conv_d;  // stride-2 downsampling conv
};

struct DecoderStage {
    Tconv up;     // stride-2 upsampling back to this resolution
    Conv conv_c;  // feature conv after the additive skip merge
};

// Everything the backward pass needs from a forward pass, plus the skip and
// merge tensors structural tests inspect.
struct ForwardTrace {
    std::vector<Tensor> enc_in;      // input to conv_a per stage
    std::vector<Tensor> skip;        // conv_a output post-ReLU (skip source)
    std::vector<Tensor> down;        // conv_d output post-ReLU
    Tensor bottleneck_out;           // post-ReLU
    std::vector<Tensor> up_out;      // tconv output post-ReLU per stage
    std::vector<Tensor> merged;      // up_out + skip (conv_c input)
    std::vector<Tensor> dec_out;     // conv_c output post-ReLU
    Tensor output;                   // final sigmoid output
};

// Addressable parameter block: a named view into one weight matrix or bias
// vector, in a fixed structural order shared by the optimizer, checkpoints,
// and gradient buffers.
struct ParamRef {
    std::string name;
    double* data = nullptr;
    std::ptrdiff_t size = 0;
};

class UNet {
public:
    UNetConfig config;
    std::uint64_t init_seed = 0;
    std::string trained_on;  // corpus id of the training pairs; empty = untrained/unknown
    std::vector<EncoderStage> encoder;
    Conv bottleneck;
    std::vector<DecoderStage> decoder;  // index i operates at resolution of encoder stage i
    Conv head;                          // 1x1 conv to 3 channels, sigmoid output

    Tensor forward(const Tensor& x, ForwardTrace* trace = nullptr) const;

    // Accumulates parameter gradients (aligned with param_refs()) and returns
    // nothing; d_output is dLoss/d(sigmoid output).
    void backward(const ForwardTrace& trace, const Tensor& d_output,
                  std::vector<Eigen::VectorXd>& grads) const;

    std::vector<ParamRef> param_refs();
    std::vector<Eigen::VectorXd> zero_grads() const;
    std::ptrdiff_t parameter_count() const;
};

// Validates the config (spatial divisibility by 2^depth, positive sizes) and
// initializes weights from the seeded generator; same seed, same weights.
UNet build_model(const UNetConfig& cfg, std::uint64_t seed);

// Analytic parameter counts for this topology with additive skips and with
// concatenation skips (which double the post-merge conv input channels).
std::ptrdiff_t additive_parameter_count(const UNetConfig& cfg);
std::ptrdiff_t concat_parameter_count(const UNetConfig& cfg);

struct ImagePair {
    Image occluded;
    Image clean;
};

struct TrainHyper {
    int batch = 64;
    double lr = 1e-3;
    int epochs = 10;
    std::uint64_t seed = 0;
};

struct TrainReport {
    std::vector<double> epoch_loss;  // mean training MSE per epoch
    double final_val_loss = 0.0;     // mean MSE on the validation pairs
    std::int64_t steps = 0;          // optimizer updates applied
    std::uint64_t seed = 0;
};

// Mean squared error between forward(occluded) and clean, averaged over pixels
// and channels; both images are resized to the model input size first.
double mse_loss(const UNet& model, const ImagePair& pair);

// Mean MSE over a pair set with the model applied; identity_baseline_mse
// scores leaving the occluded image untouched instead.
double mean_mse(const UNet& model, const std::vector<ImagePair>& pairs);
double identity_baseline_mse(const std::vector<ImagePair>& pairs, int input_size);

// Minimizes MSE with seeded shuffling and an adaptive-moment optimizer.
// Validation pairs only score the final model; an empty validation set falls
// back to scoring the training pairs. Non-finite loss aborts with a TrainError
// carrying the step index and loss value. Zero epochs is a no-op report.
TrainReport train(UNet& model, const std::vector<ImagePair>& train_pairs,
                  const std::vector<ImagePair>& val_pairs, const TrainHyper& hyper);

// Resize to the model input, forward, resize back to the original dimensions.
Image reconstruct(const UNet& model, const Image& img);

// Single-file checkpoint: versioned header with config, seed, and named tensor
// shapes, followed by raw little-endian float64 payloads in header order.
void save_checkpoint(const UNet& model, const std::string& path);
UNet load_checkpoint(const std::string& path);

} // namespace facebench::recon

#endif
