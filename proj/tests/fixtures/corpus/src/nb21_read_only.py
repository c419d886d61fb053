# %% [markdown]
# Inspections that call wrangling methods without keeping the result.
# %%
import pandas as pd
df = pd.read_csv('movies.csv')  # op: read
# %%
df['rating'].fillna(0)
df.drop(columns=['votes'])
df['genres'].map(len).head()
print(df.astype(str).dtypes)
display_cols = df.rename(columns={'title': 'name'}).columns
df.merge(df, on='title').shape
# %%
df['votes'] = df['votes'].fillna(df['votes'].mean())  # op: fillna
