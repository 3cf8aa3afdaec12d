// Copyright 2026 The isingchaos Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once

#include "isingchaos/analysis.hpp"
#include "isingchaos/chaos.hpp"
#include "isingchaos/errors.hpp"
#include "isingchaos/generators.hpp"
#include "isingchaos/io.hpp"
#include "isingchaos/model.hpp"
#include "isingchaos/noise.hpp"
#include "isingchaos/parallel_tempering.hpp"
#include "isingchaos/random.hpp"
#include "isingchaos/solvers.hpp"
#include "isingchaos/stats.hpp"
