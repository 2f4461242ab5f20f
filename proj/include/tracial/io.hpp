// Copyright 2026 The tracial Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tracial/algebra.hpp"
#include "tracial/compiler.hpp"
#include "tracial/games.hpp"
#include "tracial/optimizer.hpp"

namespace tracial {

using Json = nlohmann::ordered_json;

/// Version tags carried in the optional "format" member of each file kind.
inline constexpr const char* kGameFormat = "tracial-game 1";
inline constexpr const char* kModelFormat = "tracial-model 1";
inline constexpr const char* kMachineFormat = "tracial-tm 1";

/// Parses JSON text, mapping syntax errors to ValidationError.
Json parse_json(std::string_view text, const char* what);

/// {"blocks": [[d, "p/q"], ...]}; integer weights are accepted as well.
FiniteTracialAlgebra algebra_from_json(const Json& j, bool normalize = false);
Json algebra_to_json(const FiniteTracialAlgebra& A);

/// One element is an array of blocks; a block is the row-major list of
/// [re, im] pairs.
Json element_to_json(const Element& x);
Element element_from_json(const Json& j, const FiniteTracialAlgebra& A);
Json elements_to_json(std::span<const Element> xs);
std::vector<Element> elements_from_json(const Json& j, const FiniteTracialAlgebra& A);

/// {"n", "m", "mu": [[x, y, "p/q"]], "accept": [[a, b, x, y]]}; an optional
/// dense "decider" array replaces "accept".
RawGame raw_game_from_json(const Json& j);
Json game_to_json(const SyncGame& game);

/// {"states", "alphabet", "blank", "transitions": [[q, r, w, "L"|"R", q']],
/// "start", "accept"}.
TuringMachineDescription tm_from_json(const Json& j);
Json tm_to_json(const TuringMachineDescription& tm);

Json config_to_json(const OptimizerConfig& cfg);
Json certify_to_json(const CertifyReport& rep);
/// Value, algebra, config echo, per-restart bests and (optionally) the
/// witness. Wall-clock time goes into "wall_clock_ms".
Json certificate_to_json(const ValueCertificate& cert, bool include_witness);

}  // namespace tracial
