#include <algorithm>
#include <cmath>
#include <fstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "facebench/core/error.hpp"
#include "facebench/core/rng.hpp"
#include "facebench/imaging/geometry.hpp"
#include "facebench/recon/unet.hpp"

namespace facebench::recon {

namespace {

// Single definition of the structural parameter order shared by the gradient
// buffers, the optimizer, and checkpoints. Visits (name, matrix-view) pairs;
// biases are visited as column vectors.
template <typename Net, typename Fn>
void visit_params(Net& net, Fn&& fn) {
    const int depth = net.config.depth;
    for (int i = 0; i < depth; ++i) {
        const std::string p = "enc" + std::to_string(i);
        fn(p + ".conv_a.W", net.encoder[i].conv_a.W);
        fn(p + ".conv_a.b", net.encoder[i].conv_a.b);
        fn(p + ".conv_d.W", net.encoder[i].conv_d.W);
        fn(p + ".conv_d.b", net.encoder[i].conv_d.b);
    }
    fn("bottleneck.W", net.bottleneck.W);
    fn("bottleneck.b", net.bottleneck.b);
    for (int i = 0; i < depth; ++i) {
        const std::string p = "dec" + std::to_string(i);
        fn(p + ".up.W", net.decoder[i].up.W);
        fn(p + ".up.b", net.decoder[i].up.b);
        fn(p + ".conv_c.W", net.decoder[i].conv_c.W);
        fn(p + ".conv_c.b", net.decoder[i].conv_c.b);
    }
    fn("head.W", net.head.W);
    fn("head.b", net.head.b);
}

// Slot indices into the param_refs() order for one layer's W and b.
constexpr int kRefsPerStage = 4;

int enc_slot(int stage) { return kRefsPerStage * stage; }
int bottleneck_slot(int depth) { return kRefsPerStage * depth; }
int dec_slot(int depth, int stage) { return kRefsPerStage * depth + 2 + kRefsPerStage * stage; }
int head_slot(int depth) { return 2 * kRefsPerStage * depth + 2; }

Eigen::Map<Eigen::MatrixXd> mat_view(Eigen::VectorXd& flat, Eigen::Index rows,
                                     Eigen::Index cols) {
    return {flat.data(), rows, cols};
}

} // namespace

Tensor UNet::forward(const Tensor& x, ForwardTrace* trace) const {
    const int depth = config.depth;
    ForwardTrace local;
    ForwardTrace& t = trace ? *trace : local;
    t.enc_in.resize(depth);
    t.skip.resize(depth);
    t.down.resize(depth);
    t.up_out.resize(depth);
    t.merged.resize(depth);
    t.dec_out.resize(depth);

    Tensor cur = x;
    for (int i = 0; i < depth; ++i) {
        t.enc_in[i] = cur;
        t.skip[i] = relu(encoder[i].conv_a.forward(cur));
        t.down[i] = relu(encoder[i].conv_d.forward(t.skip[i]));
        cur = t.down[i];
    }
    t.bottleneck_out = relu(bottleneck.forward(cur));
    cur = t.bottleneck_out;
    for (int i = depth - 1; i >= 0; --i) {
        t.up_out[i] = relu(decoder[i].up.forward(cur));
        t.merged[i] = add(t.up_out[i], t.skip[i]);
        t.dec_out[i] = relu(decoder[i].conv_c.forward(t.merged[i]));
        cur = t.dec_out[i];
    }
    t.output = sigmoid(head.forward(cur));
    return t.output;
}

void UNet::backward(const ForwardTrace& trace, const Tensor& d_output,
                    std::vector<Eigen::VectorXd>& grads) const {
    const int depth = config.depth;
    auto w_of = [&](const Conv& c, int slot) {
        return mat_view(grads[slot], c.W.rows(), c.W.cols());
    };
    auto wt_of = [&](const Tconv& c, int slot) {
        return mat_view(grads[slot], c.W.rows(), c.W.cols());
    };
    auto b_view = [&](int slot) {
        return Eigen::Ref<Eigen::VectorXd>(grads[slot]);
    };

    // Head (sigmoid + 1x1 conv).
    Tensor d_pre = sigmoid_backward(d_output, trace.output);
    const int hs = head_slot(depth);
    Tensor d_cur = head.backward(trace.dec_out[0], d_pre, w_of(head, hs), b_view(hs + 1));

    // Decoder, shallow to deep; each stage hands its tconv input-gradient to
    // the next deeper stage and banks the skip branch for the encoder sweep.
    std::vector<Tensor> d_skip(depth);
    for (int i = 0; i < depth; ++i) {
        const int ds = dec_slot(depth, i);
        Tensor d_c = relu_backward(d_cur, trace.dec_out[i]);
        Tensor d_merged = decoder[i].conv_c.backward(trace.merged[i], d_c,
                                                     w_of(decoder[i].conv_c, ds + 2),
                                                     b_view(ds + 3));
        d_skip[i] = d_merged;  // additive merge: gradient flows to both branches
        Tensor d_up = relu_backward(d_merged, trace.up_out[i]);
        const Tensor& up_in = i == depth - 1 ? trace.bottleneck_out : trace.dec_out[i + 1];
        d_cur = decoder[i].up.backward(up_in, d_up, wt_of(decoder[i].up, ds), b_view(ds + 1));
    }

    // Bottleneck.
    const int bs = bottleneck_slot(depth);
    Tensor d_b = relu_backward(d_cur, trace.bottleneck_out);
    d_cur = bottleneck.backward(trace.down[depth - 1], d_b, w_of(bottleneck, bs), b_view(bs + 1));

    // Encoder, deep to shallow; skip gradients join at each stage's conv_a.
    for (int i = depth - 1; i >= 0; --i) {
        const int es = enc_slot(i);
        Tensor d_down = relu_backward(d_cur, trace.down[i]);
        Tensor d_skip_total = encoder[i].conv_d.backward(trace.skip[i], d_down,
                                                         w_of(encoder[i].conv_d, es + 2),
                                                         b_view(es + 3));
        d_skip_total = add(d_skip_total, d_skip[i]);
        Tensor d_a = relu_backward(d_skip_total, trace.skip[i]);
        d_cur = encoder[i].conv_a.backward(trace.enc_in[i], d_a, w_of(encoder[i].conv_a, es),
                                           b_view(es + 1));
    }
}

std::vector<ParamRef> UNet::param_refs() {
    std::vector<ParamRef> refs;
    visit_params(*this, [&](const std::string& name, auto& tensor) {
        refs.push_back({name, tensor.data(), tensor.size()});
    });
    return refs;
}

std::vector<Eigen::VectorXd> UNet::zero_grads() const {
    std::vector<Eigen::VectorXd> grads;
    visit_params(*this, [&](const std::string&, const auto& tensor) {
        grads.push_back(Eigen::VectorXd::Zero(tensor.size()));
    });
    return grads;
}

std::ptrdiff_t UNet::parameter_count() const {
    std::ptrdiff_t n = 0;
    visit_params(*this, [&](const std::string&, const auto& tensor) { n += tensor.size(); });
    return n;
}

namespace {

void validate_config(const UNetConfig& cfg) {
    if (cfg.depth < 1) throw ConfigError("Depth must be at least 1");
    if (cfg.base_channels < 1) throw ConfigError("Base channel count must be at least 1");
    const int stride_total = 1 << cfg.depth;
    if (cfg.input_size < stride_total || cfg.input_size % stride_total != 0)
        throw ConfigError("Input size " + std::to_string(cfg.input_size) +
                          " must be a positive multiple of 2^depth = " +
                          std::to_string(stride_total));
}

Conv make_conv(int in_c, int out_c, int k, int stride, int pad) {
    Conv c;
    c.in_c = in_c;
    c.out_c = out_c;
    c.k = k;
    c.stride = stride;
    c.pad = pad;
    c.W = Eigen::MatrixXd::Zero(out_c, static_cast<Eigen::Index>(in_c) * k * k);
    c.b = Eigen::VectorXd::Zero(out_c);
    return c;
}

Tconv make_tconv(int in_c, int out_c) {
    Tconv t;
    t.in_c = in_c;
    t.out_c = out_c;
    t.W = Eigen::MatrixXd::Zero(in_c, static_cast<Eigen::Index>(out_c) * t.k * t.k);
    t.b = Eigen::VectorXd::Zero(out_c);
    return t;
}

} // namespace

UNet build_model(const UNetConfig& cfg, std::uint64_t seed) {
    validate_config(cfg);
    UNet net;
    net.config = cfg;
    net.init_seed = seed;
    const int depth = cfg.depth;
    for (int i = 0; i < depth; ++i) {
        const int in_c = i == 0 ? 3 : cfg.stage_channels(i - 1);
        const int ch = cfg.stage_channels(i);
        EncoderStage stage;
        stage.conv_a = make_conv(in_c, ch, 3, 1, 1);
        stage.conv_d = make_conv(ch, ch, 3, 2, 1);
        net.encoder.push_back(std::move(stage));
    }
    const int deep = cfg.stage_channels(depth - 1);
    net.bottleneck = make_conv(deep, deep, 3, 1, 1);
    net.decoder.resize(depth);
    for (int i = 0; i < depth; ++i) {
        const int ch = cfg.stage_channels(i);
        const int up_in = i == depth - 1 ? deep : cfg.stage_channels(i + 1);
        net.decoder[i].up = make_tconv(up_in, ch);
        net.decoder[i].conv_c = make_conv(ch, ch, 3, 1, 1);
    }
    net.head = make_conv(cfg.stage_channels(0), 3, 1, 1, 0);

    // Seeded rectifier-aware init: weight std sqrt(2 / fan_in), the logistic
    // head at sqrt(1 / fan_in), biases zero. Draw order follows the canonical
    // parameter order, elementwise over each matrix's storage.
    Rng rng(seed);
    visit_params(net, [&](const std::string& name, auto& tensor) {
        if (name.size() >= 2 && name.compare(name.size() - 2, 2, ".b") == 0) return;
        const double fan_in = static_cast<double>(tensor.cols());
        const bool is_head = name.rfind("head.", 0) == 0;
        const double std_dev = std::sqrt((is_head ? 1.0 : 2.0) / fan_in);
        for (Eigen::Index i = 0; i < tensor.size(); ++i)
            tensor.data()[i] = rng.gaussian(0.0, std_dev);
    });
    return net;
}

namespace {

std::ptrdiff_t conv_params(std::ptrdiff_t in_c, std::ptrdiff_t out_c, std::ptrdiff_t k) {
    return out_c * in_c * k * k + out_c;
}

std::ptrdiff_t topology_parameter_count(const UNetConfig& cfg, bool concat_skips) {
    validate_config(cfg);
    const int depth = cfg.depth;
    std::ptrdiff_t n = 0;
    for (int i = 0; i < depth; ++i) {
        const int in_c = i == 0 ? 3 : cfg.stage_channels(i - 1);
        const int ch = cfg.stage_channels(i);
        n += conv_params(in_c, ch, 3);   // conv_a
        n += conv_params(ch, ch, 3);     // conv_d
    }
    const int deep = cfg.stage_channels(depth - 1);
    n += conv_params(deep, deep, 3);     // bottleneck
    for (int i = 0; i < depth; ++i) {
        const int ch = cfg.stage_channels(i);
        const int up_in = i == depth - 1 ? deep : cfg.stage_channels(i + 1);
        n += conv_params(up_in, ch, 3);  // transposed conv (same shape arithmetic)
        const int merge_in = concat_skips ? 2 * ch : ch;
        n += conv_params(merge_in, ch, 3);  // conv_c
    }
    n += conv_params(cfg.stage_channels(0), 3, 1);  // head
    return n;
}

} // namespace

std::ptrdiff_t additive_parameter_count(const UNetConfig& cfg) {
    return topology_parameter_count(cfg, false);
}

std::ptrdiff_t concat_parameter_count(const UNetConfig& cfg) {
    return topology_parameter_count(cfg, true);
}

namespace {

Tensor input_tensor(const UNet& model, const Image& img) {
    const int s = model.config.input_size;
    if (img.width() == s && img.height() == s) return tensor_from_image(img);
    return tensor_from_image(resize(img, s, s));
}

double tensor_mse(const Tensor& a, const Tensor& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) {
        const double d = a.v[i] - b.v[i];
        sum += d * d;
    }
    return sum / static_cast<double>(a.v.size());
}

} // namespace

double mse_loss(const UNet& model, const ImagePair& pair) {
    const Tensor out = model.forward(input_tensor(model, pair.occluded));
    return tensor_mse(out, input_tensor(model, pair.clean));
}

double mean_mse(const UNet& model, const std::vector<ImagePair>& pairs) {
    if (pairs.empty()) throw ContractViolation("mean_mse requires at least one pair");
    double sum = 0.0;
    for (const ImagePair& p : pairs) sum += mse_loss(model, p);
    return sum / static_cast<double>(pairs.size());
}

double identity_baseline_mse(const std::vector<ImagePair>& pairs, int input_size) {
    if (pairs.empty()) throw ContractViolation("baseline requires at least one pair");
    double sum = 0.0;
    for (const ImagePair& p : pairs) {
        const Tensor occ = tensor_from_image(resize(p.occluded, input_size, input_size));
        const Tensor clean = tensor_from_image(resize(p.clean, input_size, input_size));
        sum += tensor_mse(occ, clean);
    }
    return sum / static_cast<double>(pairs.size());
}

TrainReport train(UNet& model, const std::vector<ImagePair>& train_pairs,
                  const std::vector<ImagePair>& val_pairs, const TrainHyper& hyper) {
    if (train_pairs.empty()) throw ContractViolation("Training requires at least one pair");
    if (hyper.batch < 1) throw ConfigError("Batch size must be at least 1");
    if (hyper.epochs < 0) throw ConfigError("Epoch count must be non-negative");

    // Pre-resize every pair to the model input once.
    std::vector<std::pair<Tensor, Tensor>> data;
    data.reserve(train_pairs.size());
    for (const ImagePair& p : train_pairs)
        data.emplace_back(input_tensor(model, p.occluded), input_tensor(model, p.clean));

    std::vector<ParamRef> refs = model.param_refs();
    std::vector<Eigen::VectorXd> m_state, v_state;
    for (const ParamRef& r : refs) {
        m_state.push_back(Eigen::VectorXd::Zero(r.size));
        v_state.push_back(Eigen::VectorXd::Zero(r.size));
    }
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;

    TrainReport report;
    report.seed = hyper.seed;
    Rng rng(hyper.seed);
    std::vector<std::size_t> order(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += hyper.batch) {
            const std::size_t end = std::min(order.size(), start + hyper.batch);
            const double inv_n = 1.0 / static_cast<double>(end - start);
            std::vector<Eigen::VectorXd> grads = model.zero_grads();
            double batch_loss = 0.0;
            for (std::size_t j = start; j < end; ++j) {
                const auto& [occ, clean] = data[order[j]];
                ForwardTrace trace;
                const Tensor out = model.forward(occ, &trace);
                Tensor d_out(out.c, out.h, out.w);
                const double inv_px = 1.0 / static_cast<double>(out.v.size());
                double loss = 0.0;
                for (std::size_t i = 0; i < out.v.size(); ++i) {
                    const double diff = out.v[i] - clean.v[i];
                    loss += diff * diff * inv_px;
                    d_out.v[i] = 2.0 * diff * inv_px * inv_n;
                }
                batch_loss += loss * inv_n;
                model.backward(trace, d_out, grads);
            }
            if (!std::isfinite(batch_loss))
                throw TrainError("Non-finite training loss " + std::to_string(batch_loss) +
                                 " at optimizer step " + std::to_string(report.steps));
            epoch_sum += batch_loss * static_cast<double>(end - start);

            ++report.steps;
            const double t = static_cast<double>(report.steps);
            const double bc1 = 1.0 - std::pow(kBeta1, t);
            const double bc2 = 1.0 - std::pow(kBeta2, t);
            for (std::size_t p = 0; p < refs.size(); ++p) {
                Eigen::Map<Eigen::VectorXd> param(refs[p].data, refs[p].size);
                m_state[p] = kBeta1 * m_state[p] + (1.0 - kBeta1) * grads[p];
                v_state[p] = kBeta2 * v_state[p] +
                             (1.0 - kBeta2) * grads[p].cwiseProduct(grads[p]);
                param.array() -= hyper.lr * (m_state[p].array() / bc1) /
                                 ((v_state[p].array() / bc2).sqrt() + kEps);
            }
        }
        report.epoch_loss.push_back(epoch_sum / static_cast<double>(data.size()));
    }

    report.final_val_loss = mean_mse(model, val_pairs.empty() ? train_pairs : val_pairs);
    return report;
}

Image reconstruct(const UNet& model, const Image& img) {
    const Tensor out = model.forward(input_tensor(model, img));
    Image small = image_from_tensor(out);
    if (img.width() == small.width() && img.height() == small.height()) return small;
    return resize(small, img.width(), img.height());
}

void save_checkpoint(const UNet& model, const std::string& path) {
    nlohmann::json header;
    header["format"] = "unet-checkpoint";
    header["version"] = 1;
    header["input_size"] = model.config.input_size;
    header["depth"] = model.config.depth;
    header["base_channels"] = model.config.base_channels;
    header["seed"] = model.init_seed;
    header["trained_on"] = model.trained_on;
    header["tensors"] = nlohmann::json::array();
    visit_params(model, [&](const std::string& name, const auto& tensor) {
        header["tensors"].push_back({{"name", name}, {"size", tensor.size()}});
    });
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("Cannot write checkpoint to " + path);
    out << header.dump() << "\n";
    visit_params(model, [&](const std::string&, const auto& tensor) {
        out.write(reinterpret_cast<const char*>(tensor.data()),
                  static_cast<std::streamsize>(tensor.size() * sizeof(double)));
    });
    if (!out) throw IoError("Failed writing checkpoint to " + path);
}

UNet load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("Cannot read checkpoint from " + path);
    std::string header_line;
    if (!std::getline(in, header_line)) throw IoError("Checkpoint missing header: " + path);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_line);
    } catch (const nlohmann::json::exception& e) {
        throw IoError("Malformed checkpoint header in " + path + ": " + e.what());
    }
    UNet net;
    try {
        if (header.at("format").get<std::string>() != "unet-checkpoint" ||
            header.at("version").get<int>() != 1)
            throw IoError("Unsupported checkpoint format in " + path);
        UNetConfig cfg;
        cfg.input_size = header.at("input_size").get<int>();
        cfg.depth = header.at("depth").get<int>();
        cfg.base_channels = header.at("base_channels").get<int>();
        net = build_model(cfg, header.at("seed").get<std::uint64_t>());
        if (header.contains("trained_on")) net.trained_on = header["trained_on"].get<std::string>();
        std::size_t idx = 0;
        const auto& tensors = header.at("tensors");
        visit_params(net, [&](const std::string& name, auto& tensor) {
            if (idx >= tensors.size()) throw IoError("Checkpoint tensor list too short: " + path);
            const auto& entry = tensors[idx++];
            if (entry.at("name").get<std::string>() != name ||
                entry.at("size").get<Eigen::Index>() != tensor.size())
                throw IoError("Checkpoint tensor '" + name + "' mismatches the topology: " + path);
            if (!in.read(reinterpret_cast<char*>(tensor.data()),
                         static_cast<std::streamsize>(tensor.size() * sizeof(double))))
                throw IoError("Checkpoint truncated at tensor '" + name + "': " + path);
        });
    } catch (const nlohmann::json::exception& e) {
        throw IoError("Malformed checkpoint header in " + path + ": " + e.what());
    }
    return net;
}

} // namespace facebench::recon
