// Renders the four-panel figure to a standalone SVG via server-side echarts.

import * as echarts from 'echarts';
import {writeFileSync} from 'fs';

import type {Figure} from './figure';

const COLORS = ['#c23531', '#2f4554', '#61a0a8', '#d48265'];

const WIDTH = 980;
const HEIGHT = 760;

// 2x2 grid placement, fractions of the canvas
const GRID = [
  {left: '7%', right: '55%', top: '8%', bottom: '58%'},
  {left: '57%', right: '5%', top: '8%', bottom: '58%'},
  {left: '7%', right: '55%', top: '58%', bottom: '8%'},
  {left: '57%', right: '5%', top: '58%', bottom: '8%'},
];

export function figureOption(fig: Figure): echarts.EChartsOption {
  const option: echarts.EChartsOption = {
    animation: false,
    backgroundColor: '#ffffff',
    grid: GRID.map((g) => ({...g, containLabel: false})),
    title: fig.panels.map((p, i) => ({
      text: p.title,
      textStyle: {fontSize: 13},
      left: i % 2 === 0 ? '22%' : '72%',
      top: i < 2 ? '2%' : '52%',
      textAlign: 'center',
    })),
    xAxis: fig.panels.map((_, i) => ({
      gridIndex: i,
      type: 'value' as const,
      name: 't (s)',
      nameLocation: 'middle' as const,
      nameGap: 22,
      min: 'dataMin' as const,
      max: 'dataMax' as const,
    })),
    yAxis: fig.panels.map((p, i) => ({
      gridIndex: i,
      type: 'value' as const,
      name: p.yLabel,
      nameLocation: 'middle' as const,
      nameGap: 38,
    })),
    series: fig.panels.flatMap((p, i) =>
      p.series.map((s, j) => ({
        name: s.name,
        type: 'line' as const,
        xAxisIndex: i,
        yAxisIndex: i,
        showSymbol: false,
        lineStyle: {width: 1.2, color: COLORS[j % COLORS.length]},
        itemStyle: {color: COLORS[j % COLORS.length]},
        data: s.data,
      })),
    ),
  };
  return option;
}

export function renderSvg(fig: Figure): string {
  const chart = echarts.init(null, null, {
    renderer: 'svg',
    ssr: true,
    width: WIDTH,
    height: HEIGHT,
  });
  try {
    chart.setOption(figureOption(fig));
    return chart.renderToSVGString();
  } finally {
    chart.dispose();
  }
}

export function writeFigure(fig: Figure, outPath: string): void {
  writeFileSync(outPath, renderSvg(fig));
}
