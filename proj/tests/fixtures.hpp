#pragma once

#include <string>
#include <vector>

#include "qeeg/dataset.hpp"

namespace qeeg::test {

/// Default synthetic classes on a reduced montage and duration.
inline SynthSpec reduced_spec(std::vector<std::string> channels, double seconds) {
    SynthSpec spec = default_synth_spec();
    spec.duration_seconds = seconds;
    std::vector<ClassProfile> profiles;
    for (auto profile : spec.profiles) {
        std::vector<std::string> kept;
        for (const auto& c : profile.channels_affected)
            for (const auto& k : channels)
                if (c == k) kept.push_back(c);
        // An empty list would mean every channel.
        if (kept.empty()) continue;
        profile.channels_affected = kept;
        profiles.push_back(profile);
    }
    spec.profiles = std::move(profiles);
    spec.channels = std::move(channels);
    return spec;
}

}  // namespace qeeg::test
