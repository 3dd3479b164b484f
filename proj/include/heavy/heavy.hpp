#pragma once

#include "heavy/circle.hpp"
#include "heavy/finite.hpp"
#include "heavy/heaviness.hpp"
#include "heavy/multiples.hpp"
#include "heavy/observable.hpp"
#include "heavy/rational.hpp"
#include "heavy/systems.hpp"
#include "heavy/trace.hpp"
