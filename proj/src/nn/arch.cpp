#include "persist/nn/arch.hpp"

#include <charconv>
#include <string>

#include "persist/errors.hpp"

namespace persist::nn {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::size_t parse_count(std::string_view s, std::string_view token) {
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || value == 0)
        throw ConfigError("bad count '" + std::string(s) + "' in architecture token '" + std::string(token) + "'");
    return value;
}

} // namespace

std::vector<LayerSpec> parse_architecture(std::string_view text, Shape input, std::size_t num_classes) {
    std::vector<LayerSpec> layers;
    Shape current = input;
    auto push = [&](LayerSpec layer, std::string_view token) {
        try {
            current = output_shape(layer, current);
        } catch (const ShapeError& e) {
            throw ConfigError("architecture token '" + std::string(token) + "': " + e.what());
        }
        layers.push_back(layer);
    };

    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string_view token =
            trim(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        pos = comma == std::string_view::npos ? text.size() + 1 : comma + 1;
        if (token.empty()) {
            if (text.find_first_not_of(" \t") == std::string_view::npos) break;
            throw ConfigError("empty token in architecture '" + std::string(text) + "'");
        }
        const std::size_t colon = token.find(':');
        const std::string_view name = token.substr(0, colon);
        const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : token.substr(colon + 1);

        if (name == "dense") {
            push(LayerSpec::dense(current.size(), parse_count(arg, token)), token);
        } else if (name == "conv") {
            const std::size_t x = arg.find('x');
            if (x == std::string_view::npos)
                throw ConfigError("conv token must look like conv:CHANNELSxKERNEL, got '" + std::string(token) + "'");
            push(LayerSpec::conv2d(current.channels, parse_count(arg.substr(0, x), token),
                                   parse_count(arg.substr(x + 1), token)),
                 token);
        } else if ((name == "pool" || name == "relu" || name == "flatten") && !arg.empty()) {
            throw ConfigError("token '" + std::string(token) + "' takes no argument");
        } else if (name == "pool") {
            push(LayerSpec::max_pool(), token);
        } else if (name == "relu") {
            push(LayerSpec::relu(), token);
        } else if (name == "flatten") {
            push(LayerSpec::flatten(), token);
        } else {
            throw ConfigError("unknown architecture token '" + std::string(token) + "'");
        }
    }

    const bool has_head = !layers.empty() && layers.back().kind == LayerKind::Dense &&
                          layers.back().out_dim == num_classes;
    if (!has_head) {
        if (!current.is_flat()) push(LayerSpec::flatten(), "flatten");
        push(LayerSpec::dense(current.size(), num_classes), "head");
    }
    return layers;
}

std::string format_architecture(const std::vector<LayerSpec>& layers) {
    std::string out;
    for (const auto& layer : layers) {
        if (!out.empty()) out += ',';
        switch (layer.kind) {
        case LayerKind::Dense: out += "dense:" + std::to_string(layer.out_dim); break;
        case LayerKind::Conv2D:
            out += "conv:" + std::to_string(layer.out_channels) + "x" + std::to_string(layer.kernel_size);
            break;
        case LayerKind::MaxPool2D: out += "pool"; break;
        case LayerKind::ReLU: out += "relu"; break;
        case LayerKind::Flatten: out += "flatten"; break;
        }
    }
    return out;
}

} // namespace persist::nn
