// Assembles the fixed four-panel figure from a parsed trajectory log.
//
// Panels mirror the standard presentation of a tracking run: the attitude
// error function, the position error components, the angular velocity error
// components, and the four rotor thrusts, all against time.  The series are
// the logged values verbatim; nothing is filtered or rescaled.

import type {ColumnName, FlightLog} from './csv';

export interface Series {
  name: string;
  // [t, value] pairs straight from the log
  data: Array<[number, number]>;
}

export interface Panel {
  title: string;
  yLabel: string;
  series: Series[];
}

export interface Figure {
  panels: [Panel, Panel, Panel, Panel];
}

function seriesFrom(log: FlightLog, column: ColumnName, name: string): Series {
  return {name, data: log.t.map((t, i) => [t, log[column][i]])};
}

export function buildFigure(log: FlightLog): Figure {
  const panels: [Panel, Panel, Panel, Panel] = [
    {
      title: 'Attitude error function',
      yLabel: 'Psi',
      series: [seriesFrom(log, 'Psi', 'Psi')],
    },
    {
      title: 'Position error',
      yLabel: 'e_x (m)',
      series: [
        seriesFrom(log, 'ex0', 'e_x1'),
        seriesFrom(log, 'ex1', 'e_x2'),
        seriesFrom(log, 'ex2', 'e_x3'),
      ],
    },
    {
      title: 'Angular velocity error',
      yLabel: 'e_W (rad/sec)',
      series: [
        seriesFrom(log, 'eW0', 'e_W1'),
        seriesFrom(log, 'eW1', 'e_W2'),
        seriesFrom(log, 'eW2', 'e_W3'),
      ],
    },
    {
      title: 'Rotor thrusts',
      yLabel: 'thrust (N)',
      series: [
        seriesFrom(log, 'f1', 'f1'),
        seriesFrom(log, 'f2', 'f2'),
        seriesFrom(log, 'f3', 'f3'),
        seriesFrom(log, 'f4', 'f4'),
      ],
    },
  ];
  return {panels};
}
