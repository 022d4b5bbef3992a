// SPDX-License-Identifier: Apache-2.0
//
// canyon-sim: interference and capacity simulation for mm-wave picocells in street canyons
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CANYON_CANYON_HPP
#define CANYON_CANYON_HPP

#include "canyon/types.hpp"
#include "canyon/geometry.hpp"
#include "canyon/channel.hpp"
#include "canyon/beamforming.hpp"
#include "canyon/lp.hpp"
#include "canyon/scheduler.hpp"
#include "canyon/interference.hpp"
#include "canyon/simulation.hpp"
#include "canyon/config.hpp"
#include "canyon/experiments.hpp"

#endif // CANYON_CANYON_HPP
