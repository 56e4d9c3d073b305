// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header.

#pragma once

#include "qaction/errors.hpp"
#include "qaction/qmath.hpp"
#include "qaction/statefam.hpp"
#include "qaction/resources.hpp"
#include "qaction/geometry.hpp"
#include "qaction/problem.hpp"
#include "qaction/lagrangian.hpp"
#include "qaction/action.hpp"
#include "qaction/transcription.hpp"
#include "qaction/shooting.hpp"
