#include "arsr/pipeline.hpp"

#include <algorithm>

namespace arsr {

namespace {

void clamp01(Tensor& t) {
    for (float& v : t.data) v = std::clamp(v, 0.0f, 1.0f);
}

std::string size_str(Size s) {
    return std::to_string(s.width) + "x" + std::to_string(s.height);
}

} // namespace

Frame make_frame(Size luma_res, float y_fill, float cb_fill, float cr_fill) {
    Frame f;
    f.y = Tensor(1, 1, luma_res.height, luma_res.width, y_fill);
    f.cb = Tensor(1, 1, chroma_dim(luma_res.height), chroma_dim(luma_res.width), cb_fill);
    f.cr = Tensor(1, 1, chroma_dim(luma_res.height), chroma_dim(luma_res.width), cr_fill);
    return f;
}

void validate_frame(const Frame& f) {
    if (f.y.batch != 1 || f.y.channels != 1 || f.cb.batch != 1 || f.cb.channels != 1 ||
        f.cr.batch != 1 || f.cr.channels != 1) {
        throw ContractError("frame planes must be single-channel, single-batch tensors");
    }
    const int cw = chroma_dim(f.y.width);
    const int ch = chroma_dim(f.y.height);
    if (f.cb.width != cw || f.cb.height != ch || f.cr.width != cw || f.cr.height != ch) {
        throw ContractError("chroma planes must be ceil(luma/2): luma " + f.y.shape_str() +
                            ", cb " + f.cb.shape_str() + ", cr " + f.cr.shape_str());
    }
}

FramePlan plan(Size input_res, Size output_res) {
    if (input_res.width < 1 || input_res.height < 1) {
        throw ContractError("plan: input resolution must be positive");
    }
    if (output_res.width < input_res.width || output_res.height < input_res.height) {
        throw ContractError("plan: downscaling not supported (" + size_str(input_res) + " -> " +
                            size_str(output_res) + ")");
    }
    FramePlan p;
    for (int k : {4, 3, 2, 1}) {
        if (input_res.width * k <= output_res.width &&
            input_res.height * k <= output_res.height) {
            p.net_factor = k;
            break;
        }
    }
    const Size after_net{input_res.width * p.net_factor, input_res.height * p.net_factor};
    if (after_net != output_res) {
        p.resample_target = output_res;
    }
    return p;
}

Frame upscale_frame_with(const Frame& frame, const FramePlan& plan, const LumaNet& net,
                         ChromaMethod chroma) {
    validate_frame(frame);
    if (plan.net_factor < 1 || plan.net_factor > 4) {
        throw ContractError("plan net factor must be in {1,2,3,4}");
    }
    if (plan.net_factor > 1 && !net) {
        throw ContractError("plan needs the network but no weights were supplied");
    }

    Tensor y = frame.y;
    if (plan.net_factor > 1) {
        y = net(y);
        if (y.height != frame.y.height * plan.net_factor ||
            y.width != frame.y.width * plan.net_factor) {
            throw ContractError("network produced " + y.shape_str() + ", expected x" +
                                std::to_string(plan.net_factor) + " of " + frame.y.shape_str());
        }
    }
    if (plan.resample_target) {
        y = lanczos_resample(y, *plan.resample_target);
    }
    clamp01(y);

    const Size target{y.width, y.height};
    const Size chroma_res{chroma_dim(target.width), chroma_dim(target.height)};
    Frame out;
    out.y = std::move(y);
    out.cb = interpolate(frame.cb, chroma_res, chroma);
    out.cr = interpolate(frame.cr, chroma_res, chroma);
    clamp01(out.cb);
    clamp01(out.cr);
    return out;
}

Frame upscale_frame(const Frame& frame, const FramePlan& plan, const ModelConfig& cfg,
                    const WeightSet& w, ChromaMethod chroma) {
    if (plan.net_factor > 1) {
        if (cfg.scale != plan.net_factor) {
            throw ContractError("plan wants x" + std::to_string(plan.net_factor) +
                                " but weights are for x" + std::to_string(cfg.scale));
        }
        check_weights(cfg, w);
    }
    LumaNet net = [&](const Tensor& y) { return forward(cfg, w, y); };
    return upscale_frame_with(frame, plan, net, chroma);
}

Frame upscale_frame(const Frame& frame, const FramePlan& plan, const QuantizedModel& qm,
                    ChromaMethod chroma) {
    if (plan.net_factor > 1 && qm.cfg.scale != plan.net_factor) {
        throw ContractError("plan wants x" + std::to_string(plan.net_factor) +
                            " but weights are for x" + std::to_string(qm.cfg.scale));
    }
    LumaNet net = [&](const Tensor& y) { return quantized_forward(qm, y); };
    return upscale_frame_with(frame, plan, net, chroma);
}

Frame upscale_frame(const Frame& frame, const FramePlan& plan, ChromaMethod chroma) {
    if (plan.net_factor != 1) {
        throw ContractError("plan needs x" + std::to_string(plan.net_factor) +
                            " weights but none were supplied");
    }
    return upscale_frame_with(frame, plan, LumaNet{}, chroma);
}

} // namespace arsr
